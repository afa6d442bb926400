#include "pb/rules.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <stdexcept>

namespace pb {

namespace {

constexpr int64_t kAdd1Cap = 500;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

int64_t add1_iteration_cap() { return kAdd1Cap; }

void RuleSpec::validate() const {
    const bool is_mes = rule == Rule::MesApr || rule == Rule::MesCost;
    if (completion != Completion::None && !is_mes)
        fail("completion methods apply to MES rules only");
    if (tiebreak == TieBreak::CheaperFirst && rule != Rule::GreedyAV)
        fail("cheaper-first tie-breaking applies to GreedyAV only");
    if (ratio_ties == TieBreak::CheaperFirst && rule != Rule::GreedyCost)
        fail("ratio tie policy applies to GreedyCost only");
}

std::string RuleSpec::to_string() const {
    std::string out;
    switch (rule) {
        case Rule::GreedyAV: out = "greedy-av"; break;
        case Rule::GreedyCost: out = "greedy-cost"; break;
        case Rule::Phragmen: out = "phragmen"; break;
        case Rule::MesApr: out = "mes-apr"; break;
        case Rule::MesCost: out = "mes-cost"; break;
    }
    switch (completion) {
        case Completion::None: break;
        case Completion::Add1: out += ":add1"; break;
        case Completion::Add1GreedyAV: out += ":add1-greedyav"; break;
        case Completion::Epsilon: out += ":epsilon"; break;
        case Completion::GreedyAV: out += ":greedyav"; break;
    }
    if (tiebreak == TieBreak::CheaperFirst) out += "/cheaper";
    if (ratio_ties == TieBreak::CheaperFirst) out += "/ratio-cheaper";
    return out;
}

RuleSpec parse_rule_spec(const std::string& text) {
    RuleSpec spec;
    std::string body = text;
    if (auto slash = body.find('/'); slash != std::string::npos) {
        const std::string mod = body.substr(slash + 1);
        body = body.substr(0, slash);
        if (mod == "cheaper")
            spec.tiebreak = TieBreak::CheaperFirst;
        else if (mod == "ratio-cheaper")
            spec.ratio_ties = TieBreak::CheaperFirst;
        else
            fail("unknown rule modifier '" + mod + "'");
    }
    std::string completion;
    if (auto colon = body.find(':'); colon != std::string::npos) {
        completion = body.substr(colon + 1);
        body = body.substr(0, colon);
    }
    if (body == "greedy-av")
        spec.rule = Rule::GreedyAV;
    else if (body == "greedy-cost")
        spec.rule = Rule::GreedyCost;
    else if (body == "phragmen")
        spec.rule = Rule::Phragmen;
    else if (body == "mes-apr")
        spec.rule = Rule::MesApr;
    else if (body == "mes-cost")
        spec.rule = Rule::MesCost;
    else
        fail("unknown rule '" + body + "'");
    if (!completion.empty()) {
        if (completion == "none")
            spec.completion = Completion::None;
        else if (completion == "add1")
            spec.completion = Completion::Add1;
        else if (completion == "add1-greedyav")
            spec.completion = Completion::Add1GreedyAV;
        else if (completion == "epsilon")
            spec.completion = Completion::Epsilon;
        else if (completion == "greedyav")
            spec.completion = Completion::GreedyAV;
        else
            fail("unknown completion '" + completion + "'");
    }
    spec.validate();
    return spec;
}

bool tie_prefers(const Instance& instance, TieBreak tiebreak, int a, int b) {
    if (tiebreak == TieBreak::CheaperFirst) {
        const int sign = cmp(instance.projects[a].cost, instance.projects[b].cost);
        if (sign != 0) return sign < 0;
    }
    return instance.projects[a].tiebreak_rank < instance.projects[b].tiebreak_rank;
}

std::vector<int> greedy_av_order(const Instance& instance, const std::vector<int64_t>& scores,
                                 TieBreak tiebreak) {
    std::vector<int> order(instance.num_projects());
    for (int i = 0; i < instance.num_projects(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return tie_prefers(instance, tiebreak, a, b);
    });
    return order;
}

std::vector<char> greedy_pass(const Instance& instance, const std::vector<int>& order,
                              const Int& budget) {
    std::vector<char> selected(instance.num_projects(), 0);
    Int remaining = budget;
    for (int c : order) {
        if (instance.projects[c].cost <= remaining) {
            selected[c] = 1;
            remaining -= instance.projects[c].cost;
        }
    }
    return selected;
}

std::vector<char> greedy_av_mask(const Instance& instance, const std::vector<int64_t>& scores,
                                 TieBreak tiebreak) {
    return greedy_pass(instance, greedy_av_order(instance, scores, tiebreak), instance.budget);
}

Outcome greedy_av(const Instance& instance, TieBreak tiebreak) {
    const auto scores = instance.approval_scores();
    const auto order = greedy_av_order(instance, scores, tiebreak);
    std::vector<SelectionStep> trace;
    Int remaining = instance.budget;
    for (int c : order) {
        if (instance.projects[c].cost > remaining) continue;
        remaining -= instance.projects[c].cost;
        SelectionStep step;
        step.project = c;
        step.phase = "greedy-av";
        step.price = Rat(static_cast<long>(scores[c]));
        trace.push_back(std::move(step));
    }
    return make_outcome(instance, std::move(trace));
}

Outcome greedy_cost(const Instance& instance, TieBreak ratio_ties) {
    const auto scores = instance.approval_scores();
    std::vector<int> order(instance.num_projects());
    for (int i = 0; i < instance.num_projects(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        // score_a/cost_a vs score_b/cost_b, cross-multiplied (exact)
        const Int lhs = Int(static_cast<long>(scores[a])) * instance.projects[b].cost;
        const Int rhs = Int(static_cast<long>(scores[b])) * instance.projects[a].cost;
        const int sign = cmp(lhs, rhs);
        if (sign != 0) return sign > 0;
        return tie_prefers(instance, ratio_ties, a, b);
    });
    std::vector<SelectionStep> trace;
    Int remaining = instance.budget;
    for (int c : order) {
        if (instance.projects[c].cost > remaining) continue;
        remaining -= instance.projects[c].cost;
        SelectionStep step;
        step.project = c;
        step.phase = "greedy-cost";
        step.price = make_rat(Int(static_cast<long>(scores[c])), instance.projects[c].cost);
        trace.push_back(std::move(step));
    }
    return make_outcome(instance, std::move(trace));
}

Outcome phragmen(const Instance& instance) {
    const int m = instance.num_projects();
    const auto approvers = instance.approvers_by_project();

    std::vector<Rat> reset_time(instance.num_voters(), Rat(0));
    std::vector<Rat> reset_sum(m, Rat(0));  // sum of supporters' reset times
    std::vector<char> done(m, 0);
    Int spent = 0;
    std::vector<SelectionStep> trace;

    for (;;) {
        const Int remaining = instance.budget - spent;
        int best = -1;
        Rat best_time;
        for (int c = 0; c < m; ++c) {
            if (done[c] || approvers[c].empty()) continue;
            if (instance.projects[c].cost > remaining) continue;  // dropped for good
            // purchase time: supporters' balances reach cost(c)
            Rat t = (Rat(instance.projects[c].cost) + reset_sum[c]) /
                    Rat(static_cast<long>(approvers[c].size()));
            if (best < 0 || t < best_time ||
                (t == best_time && instance.projects[c].tiebreak_rank <
                                       instance.projects[best].tiebreak_rank)) {
                best = c;
                best_time = std::move(t);
            }
        }
        if (best < 0) break;

        SelectionStep step;
        step.project = best;
        step.phase = "phragmen";
        step.price = best_time;
        for (int v : approvers[best]) {
            Rat payment = best_time - reset_time[v];
            if (payment != 0) step.payments.emplace_back(v, payment);
            // v's balance resets; every project v approves sees the change
            for (int d : instance.approvals[v])
                if (!done[d]) reset_sum[d] += best_time - reset_time[v];
            reset_time[v] = best_time;
        }
        spent += instance.projects[best].cost;
        done[best] = 1;
        trace.push_back(std::move(step));
    }
    return make_outcome(instance, std::move(trace));
}

namespace {

struct MesSupporter {
    int voter;
    Rat utility;
};

// Minimal q with sum_j min(balance_j, utility_j * q) = cost, or nullopt when
// the supporters cannot cover the cost. Sorted-prefix walk over balance/utility.
// With a uniform utility (every plain MES project) the ratio order is just
// the balance order, which skips the cross-multiplications.
std::optional<Rat> solve_q(const std::vector<MesSupporter>& supporters,
                           const std::vector<Rat>& balances, const Int& cost,
                           bool uniform_utility) {
    if (supporters.empty()) return std::nullopt;
    std::vector<int> idx(supporters.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);

    if (uniform_utility) {
        // all utilities equal u: work with the scaled price q' = u*q, whose
        // saturation test against a balance needs no multiplication
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return balances[supporters[a].voter] < balances[supporters[b].voter];
        });
        Rat remaining = Rat(cost);
        long unsaturated = static_cast<long>(idx.size());
        for (int i : idx) {
            const Rat& balance = balances[supporters[i].voter];
            Rat scaled = remaining / Rat(unsaturated);
            if (scaled <= balance) {
                const Rat& utility = supporters[idx[0]].utility;
                if (utility == 1) return scaled;
                return scaled / utility;
            }
            remaining -= balance;
            --unsaturated;
        }
        return std::nullopt;  // total balance below cost
    }

    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        // balance_a/utility_a < balance_b/utility_b
        return balances[supporters[a].voter] * supporters[b].utility <
               balances[supporters[b].voter] * supporters[a].utility;
    });
    Rat remaining = Rat(cost);
    Rat util_left = 0;
    for (int i : idx) util_left += supporters[i].utility;
    for (int i : idx) {
        const Rat& balance = balances[supporters[i].voter];
        const Rat& utility = supporters[i].utility;
        // q candidate assuming this and all later supporters are unsaturated
        Rat q = remaining / util_left;
        if (q * utility <= balance) return q;
        remaining -= balance;
        util_left -= utility;
    }
    return std::nullopt;  // total balance below cost
}

struct HeapEntry {
    Rat q;
    int rank;
    int project;
    uint64_t stamp;
};

struct HeapCmp {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        const int sign = cmp(a.q, b.q);
        if (sign != 0) return sign > 0;  // min-heap on q
        return a.rank > b.rank;
    }
};

// Shared MES core. epsilon > 0 gives every non-approver utility
// epsilon*cost(c), so all projects have full supporter sets.
Outcome mes_core(const Instance& instance, MesUtility utility_mode, const Rat& endowment,
                 const Rat& epsilon, const std::string& phase) {
    const int m = instance.num_projects();
    const int n = instance.num_voters();
    const bool everyone = epsilon > 0;
    const auto approvers = instance.approvers_by_project();

    std::vector<Rat> balances(n, endowment);
    std::vector<std::vector<MesSupporter>> supporters(m);
    for (int c = 0; c < m; ++c) {
        const Int& cost = instance.projects[c].cost;
        const Rat approval_utility =
            utility_mode == MesUtility::Approval ? Rat(1) : Rat(cost);
        if (everyone) {
            std::vector<char> is_approver(n, 0);
            for (int v : approvers[c]) is_approver[v] = 1;
            const Rat outsider_utility = epsilon * Rat(cost);
            for (int v = 0; v < n; ++v)
                supporters[c].push_back({v, is_approver[v] ? approval_utility : outsider_utility});
        } else {
            for (int v : approvers[c]) supporters[c].push_back({v, approval_utility});
        }
    }

    // supporter money per project, kept incrementally so unaffordable
    // projects are dropped without solving for q (money only decreases)
    Rat global_money = endowment * Rat(static_cast<long>(n));
    std::vector<Rat> supporter_money(m, Rat(0));
    for (int c = 0; c < m; ++c)
        if (!everyone)
            supporter_money[c] =
                endowment * Rat(static_cast<long>(supporters[c].size()));

    // Lazy priority queue: entries are lower bounds on a project's current q
    // (balances only decrease, so q only grows). An entry whose stamp matches
    // the project's balance version is exact and wins.
    std::vector<uint64_t> version(m, 1);
    std::vector<char> done(m, 0);
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapCmp> heap;
    for (int c = 0; c < m; ++c)
        if (!supporters[c].empty())
            heap.push({Rat(0), instance.projects[c].tiebreak_rank, c, 0});

    std::vector<SelectionStep> trace;
    while (!heap.empty()) {
        HeapEntry top = heap.top();
        heap.pop();
        const int c = top.project;
        if (done[c]) continue;
        if (top.stamp != version[c]) {
            const Rat& money = everyone ? global_money : supporter_money[c];
            if (money < Rat(instance.projects[c].cost)) {
                done[c] = 1;  // dropped permanently; balances only decrease
                continue;
            }
            auto q = solve_q(supporters[c], balances, instance.projects[c].cost, !everyone);
            if (!q) {
                done[c] = 1;
                continue;
            }
            heap.push({std::move(*q), top.rank, c, version[c]});
            continue;
        }

        // exact minimal q; select and charge the supporters
        done[c] = 1;
        SelectionStep step;
        step.project = c;
        step.phase = phase;
        step.price = top.q;
        Rat charged = 0;
        for (const auto& s : supporters[c]) {
            Rat payment = s.utility * top.q;
            if (payment > balances[s.voter]) payment = balances[s.voter];
            if (payment == 0) continue;
            balances[s.voter] -= payment;
            charged += payment;
            if (everyone) {
                global_money -= payment;
            } else {
                for (int d : instance.approvals[s.voter]) {
                    if (done[d]) continue;
                    ++version[d];
                    supporter_money[d] -= payment;
                }
            }
            step.payments.emplace_back(s.voter, std::move(payment));
        }
        if (charged != Rat(instance.projects[c].cost))
            throw std::logic_error("MES payments do not sum to the project cost");
        if (everyone)
            for (int d = 0; d < m; ++d)
                if (!done[d]) ++version[d];
        trace.push_back(std::move(step));
    }
    return make_outcome(instance, std::move(trace));
}

Rat base_endowment(const Instance& instance) {
    return make_rat(instance.budget, Int(instance.num_voters()));
}

// GreedyAV (order-based) over the still-unselected projects, spending what is
// left of the original budget. Appends fill steps to the outcome.
Outcome greedy_fill(const Instance& instance, Outcome outcome) {
    const auto scores = instance.approval_scores();
    const auto order = greedy_av_order(instance, scores, TieBreak::OrderBased);
    Int remaining = instance.budget - outcome.total_cost;
    std::vector<SelectionStep> trace = std::move(outcome.trace);
    for (int c : order) {
        if (outcome.contains(c)) continue;
        if (instance.projects[c].cost > remaining) continue;
        remaining -= instance.projects[c].cost;
        SelectionStep step;
        step.project = c;
        step.phase = "greedyav-fill";
        step.price = Rat(static_cast<long>(scores[c]));
        trace.push_back(std::move(step));
    }
    Outcome filled = make_outcome(instance, std::move(trace));
    filled.completion = outcome.completion;
    return filled;
}

// Raise endowments by 1% of the budget at a time; keep the last outcome that
// fits the original budget, stop on the first overshoot or once exhaustive.
Outcome add1(const Instance& instance, MesUtility utility_mode) {
    const Int& budget = instance.budget;
    Outcome kept;
    int64_t kept_steps = 0;
    bool cap_hit = false;
    for (int64_t k = 0;; ++k) {
        if (k > kAdd1Cap) {
            cap_hit = true;
            break;
        }
        const Rat endowment = make_rat(budget * Int(100 + k), Int(100) * Int(instance.num_voters()));
        Outcome outcome = mes_core(instance, utility_mode, endowment, Rat(0), "mes-add1");
        if (outcome.total_cost > budget) break;
        kept = std::move(outcome);
        kept_steps = k;
        if (is_exhaustive(instance, kept.selected, false)) break;
    }
    kept.completion.used = true;
    kept.completion.method = "add1";
    kept.completion.add1_steps = static_cast<int>(kept_steps);
    kept.completion.cap_hit = cap_hit;
    return kept;
}

Outcome epsilon_completion(const Instance& instance, MesUtility utility_mode) {
    const Rat endowment = base_endowment(instance);
    Outcome raw = mes_core(instance, utility_mode, endowment, Rat(0), "mes");
    if (is_exhaustive(instance, raw.selected, true)) return raw;

    auto outcome_at = [&](const Rat& eps) {
        return mes_core(instance, utility_mode, endowment, eps, "mes-epsilon");
    };
    auto exhaustive_at = [&](const Outcome& o) { return is_exhaustive(instance, o.selected, true); };

    // doubling search upward from a tiny epsilon
    Rat lo = 0;                      // known non-exhaustive (raw MES)
    Rat hi = make_rat(Int(1), Int(1) << 40);
    Outcome best = outcome_at(hi);
    while (!exhaustive_at(best)) {
        lo = hi;
        hi = hi * 2;
        if (hi > 1) hi = 1;
        best = outcome_at(hi);
        if (hi == 1 && !exhaustive_at(best))
            throw std::logic_error("epsilon completion found no exhaustive outcome at epsilon=1");
    }
    if (lo > 0) {
        // bisection to relative width 1e-9
        const Rat rel = make_rat(1, 1000000000L);
        while (hi - lo > hi * rel) {
            Rat mid = (lo + hi) / 2;
            Outcome probe = outcome_at(mid);
            if (exhaustive_at(probe)) {
                hi = std::move(mid);
                best = std::move(probe);
            } else {
                lo = std::move(mid);
            }
        }
    }
    // lo == 0: the smallest exhaustive epsilon is undefined (every positive
    // epsilon works); keep the one the search found
    best.completion.used = true;
    best.completion.method = "epsilon";
    best.completion.epsilon = hi;
    return best;
}

}  // namespace

Outcome mes(const Instance& instance, MesUtility utility) {
    return mes_core(instance, utility, base_endowment(instance), Rat(0), "mes");
}

Outcome run_rule(const Instance& instance, const RuleSpec& spec) {
    spec.validate();
    switch (spec.rule) {
        case Rule::GreedyAV: return greedy_av(instance, spec.tiebreak);
        case Rule::GreedyCost: return greedy_cost(instance, spec.ratio_ties);
        case Rule::Phragmen: return phragmen(instance);
        case Rule::MesApr:
        case Rule::MesCost: break;
    }
    const MesUtility utility =
        spec.rule == Rule::MesApr ? MesUtility::Approval : MesUtility::Cost;
    switch (spec.completion) {
        case Completion::None:
            return mes(instance, utility);
        case Completion::GreedyAV: {
            Outcome raw = mes(instance, utility);
            if (is_exhaustive(instance, raw.selected, true)) return raw;
            raw.completion.used = true;
            raw.completion.method = "greedyav";
            return greedy_fill(instance, std::move(raw));
        }
        case Completion::Add1:
            return add1(instance, utility);
        case Completion::Add1GreedyAV: {
            Outcome base = add1(instance, utility);
            base.completion.method = "add1-greedyav";
            if (is_exhaustive(instance, base.selected, true)) return base;
            return greedy_fill(instance, std::move(base));
        }
        case Completion::Epsilon:
            return epsilon_completion(instance, utility);
    }
    fail("unreachable rule spec");
}

std::vector<char> run_rule_mask(const Instance& instance, const RuleSpec& spec) {
    if (spec.rule == Rule::GreedyAV)
        return greedy_av_mask(instance, instance.approval_scores(), spec.tiebreak);
    const Outcome outcome = run_rule(instance, spec);
    std::vector<char> mask(instance.num_projects(), 0);
    for (int c : outcome.selected) mask[c] = 1;
    return mask;
}

}  // namespace pb
