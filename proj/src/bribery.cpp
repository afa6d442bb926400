#include "pb/bribery.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pb {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void require_semantics(const BriberyQuery& query, FlipSemantics expected, const char* op) {
    if (query.semantics != expected)
        fail(std::string(op) + ": wrong flip-count semantics for this operation");
    if (query.radius < 0) fail(std::string(op) + ": negative radius");
}

// ways[x][l]: number of ways to flip exactly x approvals regarding one
// project with initial score a so that it ends up with l approvals:
// C(n-a, adds) * C(a, removes) with adds - removes = l - a, adds + removes = x.
std::vector<std::vector<Int>> flip_ways_table(int n, int a, int64_t rmax) {
    std::vector<std::vector<Int>> ways(rmax + 1, std::vector<Int>(n + 1, Int(0)));
    for (int64_t x = 0; x <= rmax; ++x) {
        for (int l = 0; l <= n; ++l) {
            const int64_t diff = l - a;
            if ((x + diff) % 2 != 0) continue;
            const int64_t adds = (x + diff) / 2;
            const int64_t removes = (x - diff) / 2;
            if (adds < 0 || removes < 0 || adds > n - a || removes > a) continue;
            ways[x][l] = binomial(static_cast<unsigned long>(n - a),
                                  static_cast<unsigned long>(adds)) *
                         binomial(static_cast<unsigned long>(a),
                                  static_cast<unsigned long>(removes));
        }
    }
    return ways;
}

Int atmost_enumeration_size(int64_t pairs, int64_t radius) {
    Int total = 0;
    for (int64_t k = 0; k <= std::min(radius, pairs); ++k)
        total += binomial(static_cast<unsigned long>(pairs), static_cast<unsigned long>(k));
    return total;
}

// exact-size enumeration: toggle r distinct pairs, indices strictly increasing
void enum_exact(Instance& scratch, const RuleSpec& spec, int target, int pairs, int m,
                int next, int depth, Int& acc) {
    if (depth == 0) {
        acc += run_rule_mask(scratch, spec)[target] ? 1 : 0;
        return;
    }
    for (int k = next; k <= pairs - depth; ++k) {
        flip_in_place(scratch, k / m, k % m);
        enum_exact(scratch, spec, target, pairs, m, k + 1, depth - 1, acc);
        flip_in_place(scratch, k / m, k % m);
    }
}

// every subset of size <= depth, evaluated at each node; early exit on hit
bool enum_atmost(Instance& scratch, const RuleSpec& spec, int target, int pairs, int m,
                 int next, int depth, std::atomic<bool>& found) {
    if (found.load(std::memory_order_relaxed)) return true;
    if (run_rule_mask(scratch, spec)[target]) {
        found.store(true, std::memory_order_relaxed);
        return true;
    }
    if (depth == 0) return false;
    for (int k = next; k < pairs; ++k) {
        flip_in_place(scratch, k / m, k % m);
        const bool hit = enum_atmost(scratch, spec, target, pairs, m, k + 1, depth - 1, found);
        flip_in_place(scratch, k / m, k % m);
        if (hit) return true;
    }
    return false;
}

}  // namespace

Int count_bruteforce(const Instance& instance, const RuleSpec& spec, const BriberyQuery& query,
                     const BriberyGuards& guards, bool parallel) {
    require_semantics(query, FlipSemantics::ExactlyR, "count_bruteforce");
    const int m = instance.num_projects();
    const int pairs = m * instance.num_voters();
    const int64_t r = query.radius;
    if (r > pairs) return 0;

    const Int needed = binomial(pairs, static_cast<unsigned long>(r));
    if (needed > Int(static_cast<unsigned long>(guards.enumeration_cap)))
        throw GuardError("brute-force count needs " + needed.get_str() +
                         " rule evaluations, cap is " + std::to_string(guards.enumeration_cap));

    if (r == 0) {
        Instance scratch = instance;
        return run_rule_mask(scratch, spec)[query.target] ? 1 : 0;
    }

#ifdef _OPENMP
    if (parallel) {
        std::vector<Int> partial;
        #pragma omp parallel
        {
            #pragma omp single
            partial.assign(omp_get_num_threads(), Int(0));
            Instance scratch = instance;
            Int local = 0;
            #pragma omp for schedule(dynamic)
            for (int k0 = 0; k0 <= pairs - r; ++k0) {
                flip_in_place(scratch, k0 / m, k0 % m);
                enum_exact(scratch, spec, query.target, pairs, m, k0 + 1,
                           static_cast<int>(r) - 1, local);
                flip_in_place(scratch, k0 / m, k0 % m);
            }
            partial[omp_get_thread_num()] = std::move(local);
        }
        Int total = 0;
        for (const Int& part : partial) total += part;
        return total;
    }
#else
    (void)parallel;
#endif
    Instance scratch = instance;
    Int total = 0;
    enum_exact(scratch, spec, query.target, pairs, m, 0, static_cast<int>(r), total);
    return total;
}

bool decide_bruteforce(const Instance& instance, const RuleSpec& spec, const BriberyQuery& query,
                       const BriberyGuards& guards, bool parallel) {
    require_semantics(query, FlipSemantics::AtMostR, "decide_bruteforce");
    const int m = instance.num_projects();
    const int pairs = m * instance.num_voters();
    const int64_t r = std::min<int64_t>(query.radius, pairs);

    const Int needed = atmost_enumeration_size(pairs, r);
    if (needed > Int(static_cast<unsigned long>(guards.enumeration_cap)))
        throw GuardError("brute-force decision needs up to " + needed.get_str() +
                         " rule evaluations, cap is " + std::to_string(guards.enumeration_cap));

    std::atomic<bool> found{false};
    {
        Instance scratch = instance;
        if (run_rule_mask(scratch, spec)[query.target]) return true;
    }
    if (r == 0) return false;

#ifdef _OPENMP
    if (parallel) {
        #pragma omp parallel
        {
            Instance scratch = instance;
            #pragma omp for schedule(dynamic)
            for (int k0 = 0; k0 < pairs; ++k0) {
                if (found.load(std::memory_order_relaxed)) continue;
                flip_in_place(scratch, k0 / m, k0 % m);
                enum_atmost(scratch, spec, query.target, pairs, m, k0 + 1,
                            static_cast<int>(r) - 1, found);
                flip_in_place(scratch, k0 / m, k0 % m);
            }
        }
        return found.load();
    }
#else
    (void)parallel;
#endif
    Instance scratch = instance;
    for (int k0 = 0; k0 < pairs && !found; ++k0) {
        flip_in_place(scratch, k0 / m, k0 % m);
        enum_atmost(scratch, spec, query.target, pairs, m, k0 + 1, static_cast<int>(r) - 1,
                    found);
        flip_in_place(scratch, k0 / m, k0 % m);
    }
    return found.load();
}

Int count_greedyav_signature_dp(const Instance& instance, const BriberyQuery& query,
                                TieBreak tiebreak, const BriberyGuards& guards) {
    require_semantics(query, FlipSemantics::ExactlyR, "count_greedyav_signature_dp");
    const int m = instance.num_projects();
    const int n = instance.num_voters();
    const int64_t r = query.radius;
    if (r > static_cast<int64_t>(m) * n) return 0;

    unsigned __int128 entries = 1;
    for (int i = 0; i < m && entries <= guards.signature_entries_cap; ++i) entries *= 3;
    entries *= static_cast<uint64_t>(m);
    entries *= static_cast<uint64_t>(n + 1);
    entries *= static_cast<uint64_t>(r + 1);
    if (entries > guards.signature_entries_cap)
        throw GuardError("signature DP table needs over " +
                         std::to_string(static_cast<uint64_t>(
                             std::min<unsigned __int128>(entries, UINT64_MAX))) +
                         " entries, cap is " + std::to_string(guards.signature_entries_cap));
    const uint64_t pow3_m = [&] {
        uint64_t p = 1;
        for (int i = 0; i < m; ++i) p *= 3;
        return p;
    }();

    std::vector<uint64_t> pow3(m + 1, 1);
    for (int i = 1; i <= m; ++i) pow3[i] = pow3[i - 1] * 3;

    const auto scores = instance.approval_scores();
    std::vector<std::vector<std::vector<Int>>> flip_ways;  // per project
    flip_ways.reserve(m);
    for (int c = 0; c < m; ++c)
        flip_ways.push_back(flip_ways_table(n, static_cast<int>(scores[c]), r));

    // total cost of value-1 projects per signature
    std::vector<Int> cost_of_selected(pow3_m, Int(0));
    for (uint64_t code = 1; code < pow3_m; ++code) {
        int low = 0;
        while ((code / pow3[low]) % 3 == 0) ++low;
        const int digit = static_cast<int>((code / pow3[low]) % 3);
        cost_of_selected[code] = cost_of_selected[code - digit * pow3[low]];
        if (digit == 1) cost_of_selected[code] += instance.projects[low].cost;
    }

    // group signatures by support size
    std::vector<std::vector<uint64_t>> by_level(m + 1);
    for (uint64_t code = 0; code < pow3_m; ++code) {
        int level = 0;
        for (int i = 0; i < m; ++i)
            if ((code / pow3[i]) % 3 != 0) ++level;
        by_level[level].push_back(code);
    }

    const int width_l = n + 1;
    const int width_r = static_cast<int>(r) + 1;
    const int per_project = width_l * width_r;
    auto slot = [&](int c, int l, int rr) { return (c * width_l + l) * width_r + rr; };

    // tables[code]: suffix-summed over l once the level is finished
    std::vector<std::vector<Int>> tables(pow3_m);

    Int answer = 0;
    for (int level = 1; level <= m; ++level) {
        for (uint64_t code : by_level[level]) {
            std::vector<int> support;
            for (int i = 0; i < m; ++i)
                if ((code / pow3[i]) % 3 != 0) support.push_back(i);
            std::vector<Int> table(static_cast<size_t>(m) * per_project, Int(0));
            for (int last : support) {
                const int digit = static_cast<int>((code / pow3[last]) % 3);
                const uint64_t prev_code = code - static_cast<uint64_t>(digit) * pow3[last];
                // feasibility when `last` is considered: money already spent
                // is the cost of the value-1 projects before it
                const Int& spent = cost_of_selected[prev_code];
                const Int available = instance.budget - instance.projects[last].cost;
                if (digit == 1 && spent > available) continue;
                if (digit == 2 && spent <= available) continue;
                const auto& ways_last = flip_ways[last];
                if (level == 1) {
                    for (int l = 0; l <= n; ++l)
                        for (int rr = 0; rr <= r; ++rr)
                            table[slot(last, l, rr)] = ways_last[rr][l];
                    continue;
                }
                const std::vector<Int>& prev = tables[prev_code];
                for (int before : support) {
                    if (before == last) continue;
                    // t=0 when `before` wins the tie against `last`
                    const int t = tie_prefers(instance, tiebreak, before, last) ? 0 : 1;
                    for (int l = 0; l <= n; ++l) {
                        const int lmin = l + t;
                        if (lmin > n) continue;
                        for (int rr = 0; rr <= r; ++rr) {
                            Int acc = 0;
                            for (int used = 0; used <= rr; ++used) {
                                const Int& w = ways_last[used][l];
                                if (w == 0) continue;
                                acc += prev[slot(before, lmin, rr - used)] * w;
                            }
                            table[slot(last, l, rr)] += acc;
                        }
                    }
                }
            }
            if (level == m) {
                const int p_digit = static_cast<int>((code / pow3[query.target]) % 3);
                if (p_digit == 1)
                    for (int last : support)
                        for (int l = 0; l <= n; ++l)
                            answer += table[slot(last, l, static_cast<int>(r))];
            }
            // suffix sums over l so later levels read "score >= l" directly
            for (int c : support)
                for (int rr = 0; rr <= r; ++rr)
                    for (int l = n - 1; l >= 0; --l)
                        table[slot(c, l, rr)] += table[slot(c, l + 1, rr)];
            tables[code] = std::move(table);
        }
        if (level >= 2)
            for (uint64_t code : by_level[level - 1]) tables[code] = {};
    }
    return answer;
}

Int count_greedyav_ordering_dp(const Instance& instance, const BriberyQuery& query,
                               TieBreak tiebreak, const BriberyGuards& guards) {
    require_semantics(query, FlipSemantics::ExactlyR, "count_greedyav_ordering_dp");
    const int m = instance.num_projects();
    const int n = instance.num_voters();
    const int64_t r = query.radius;
    if (r > static_cast<int64_t>(m) * n) return 0;
    if (m > guards.ordering_max_projects)
        throw GuardError("orderings DP enumerates m! orders; m=" + std::to_string(m) +
                         " exceeds the guard of " + std::to_string(guards.ordering_max_projects));

    const auto scores = instance.approval_scores();
    std::vector<std::vector<std::vector<Int>>> flip_ways;
    flip_ways.reserve(m);
    for (int c = 0; c < m; ++c)
        flip_ways.push_back(flip_ways_table(n, static_cast<int>(scores[c]), r));

    const int width_r = static_cast<int>(r) + 1;
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;

    Int answer = 0;
    std::vector<Int> suffix((n + 2) * width_r);  // suffix over scores of f_{i-1}
    std::vector<Int> current((n + 2) * width_r);
    auto at = [&](std::vector<Int>& grid, int s, int rr) -> Int& {
        return grid[s * width_r + rr];
    };

    do {
        // would GreedyAV, considering projects in this order, select the target?
        Int remaining = instance.budget;
        bool target_selected = false;
        for (int c : order) {
            if (instance.projects[c].cost > remaining) continue;
            remaining -= instance.projects[c].cost;
            if (c == query.target) target_selected = true;
        }
        if (!target_selected) continue;

        // count flip assignments realizing exactly this consideration order
        for (int i = 0; i < m; ++i) {
            const int c = order[i];
            std::fill(current.begin(), current.end(), Int(0));
            if (i == 0) {
                for (int s = 0; s <= n; ++s)
                    for (int rr = 0; rr <= r; ++rr) at(current, s, rr) = flip_ways[c][rr][s];
            } else {
                // prior project needs strictly more approvals when the tie
                // would put this one first
                const int t = tie_prefers(instance, tiebreak, c, order[i - 1]) ? 1 : 0;
                for (int s = 0; s <= n; ++s) {
                    if (s + t > n) continue;
                    for (int rr = 0; rr <= r; ++rr) {
                        Int acc = 0;
                        for (int x = 0; x <= rr; ++x) {
                            const Int& w = flip_ways[c][x][s];
                            if (w == 0) continue;
                            acc += at(suffix, s + t, rr - x) * w;
                        }
                        at(current, s, rr) = std::move(acc);
                    }
                }
            }
            // suffix sums over s for the next project
            for (int rr = 0; rr <= r; ++rr) {
                at(suffix, n + 1, rr) = 0;
                for (int s = n; s >= 0; --s)
                    at(suffix, s, rr) = at(suffix, s + 1, rr) + at(current, s, rr);
            }
        }
        answer += at(suffix, 0, static_cast<int>(r));
    } while (std::next_permutation(order.begin(), order.end()));
    return answer;
}

Int count_greedyav_unit_cost(const Instance& instance, const BriberyQuery& query,
                             TieBreak tiebreak) {
    require_semantics(query, FlipSemantics::ExactlyR, "count_greedyav_unit_cost");
    const int m = instance.num_projects();
    const int n = instance.num_voters();
    const int64_t r = query.radius;
    for (const auto& p : instance.projects)
        if (p.cost != 1)
            fail("unit-cost solver requires unit costs; project " + p.id + " has cost " +
                 p.cost.get_str());
    if (r > static_cast<int64_t>(m) * n) return 0;
    if (instance.budget >= m)
        return binomial(static_cast<unsigned long>(m) * n, static_cast<unsigned long>(r));
    const int budget = static_cast<int>(instance.budget.get_si());  // < m
    if (budget == 0) return 0;

    const auto scores = instance.approval_scores();
    const int p = query.target;
    std::vector<int> others;
    for (int c = 0; c < m; ++c)
        if (c != p) others.push_back(c);

    const int width_r = static_cast<int>(r) + 1;
    std::vector<std::vector<Int>> ways_p = flip_ways_table(n, static_cast<int>(scores[p]), r);

    // per other project: prefix sums over final scores of its flip-ways table
    std::vector<std::vector<std::vector<Int>>> prefix(others.size());
    for (size_t i = 0; i < others.size(); ++i) {
        auto ways = flip_ways_table(n, static_cast<int>(scores[others[i]]), r);
        prefix[i].assign(width_r, std::vector<Int>(n + 2, Int(0)));
        for (int x = 0; x <= r; ++x)
            for (int l = 0; l <= n; ++l)
                prefix[i][x][l + 1] = prefix[i][x][l] + ways[x][l];
    }

    Int answer = 0;
    std::vector<Int> grid, next;
    for (int score_p = 0; score_p <= n; ++score_p) {
        // g[rr][j]: ways to flip rr approvals on the first i other projects
        // so that exactly j of them precede the target
        grid.assign(static_cast<size_t>(width_r) * budget, Int(0));
        auto at = [&](std::vector<Int>& g, int rr, int j) -> Int& {
            return g[static_cast<size_t>(rr) * budget + j];
        };
        at(grid, 0, 0) = 1;
        for (size_t i = 0; i < others.size(); ++i) {
            const int c = others[i];
            const int t = tie_prefers(instance, tiebreak, c, p) ? 1 : 0;
            next.assign(static_cast<size_t>(width_r) * budget, Int(0));
            for (int rr = 0; rr <= r; ++rr) {
                for (int x = 0; x <= rr; ++x) {
                    // after the target: final score <= score_p - t
                    const int hi_after = std::min(score_p - t, n);
                    const Int after =
                        hi_after >= 0 ? prefix[i][x][hi_after + 1] : Int(0);
                    // before the target: final score >= score_p + 1 - t
                    const int lo_before = std::max(score_p + 1 - t, 0);
                    const Int before = prefix[i][x][n + 1] - prefix[i][x][lo_before];
                    if (after == 0 && before == 0) continue;
                    for (int j = 0; j < budget; ++j) {
                        const Int& src = at(grid, rr - x, j);
                        if (src == 0) continue;
                        if (after != 0) at(next, rr, j) += src * after;
                        if (before != 0 && j + 1 < budget) at(next, rr, j + 1) += src * before;
                    }
                }
            }
            grid.swap(next);
        }
        for (int x = 0; x <= r; ++x) {
            const Int& wp = ways_p[x][score_p];
            if (wp == 0) continue;
            Int fits = 0;  // at most budget-1 projects ahead of the target
            for (int j = 0; j < budget; ++j) fits += at(grid, static_cast<int>(r) - x, j);
            answer += wp * fits;
        }
    }
    return answer;
}

bool decide_greedyav_cheaper_first(const Instance& instance, const BriberyQuery& query,
                                   const BriberyGuards& guards) {
    require_semantics(query, FlipSemantics::AtMostR, "decide_greedyav_cheaper_first");
    const int n = instance.num_voters();
    const int64_t r = query.radius;
    RuleSpec spec;
    spec.rule = Rule::GreedyAV;
    spec.tiebreak = TieBreak::CheaperFirst;

    if (r < n) return decide_bruteforce(instance, spec, query, guards);

    // r >= n: approve the target everywhere, then strip single approvals from
    // the most costly all-approved projects considered before it
    Instance scratch = instance;
    const int p = query.target;
    int64_t flips_left = r;
    for (int v = 0; v < n; ++v) {
        if (scratch.approves(v, p)) continue;
        flip_in_place(scratch, v, p);
        --flips_left;
    }
    while (flips_left > 0) {
        const auto scores = scratch.approval_scores();
        int candidate = -1;
        for (int c = 0; c < scratch.num_projects(); ++c) {
            if (c == p || scores[c] != n) continue;
            if (!tie_prefers(scratch, TieBreak::CheaperFirst, c, p)) continue;
            if (candidate < 0 || scratch.projects[c].cost > scratch.projects[candidate].cost ||
                (scratch.projects[c].cost == scratch.projects[candidate].cost &&
                 scratch.projects[c].tiebreak_rank < scratch.projects[candidate].tiebreak_rank))
                candidate = c;
        }
        if (candidate < 0) break;
        flip_in_place(scratch, 0, candidate);  // any voter works, all approve it
        --flips_left;
    }
    return greedy_av_mask(scratch, scratch.approval_scores(), TieBreak::CheaperFirst)[p] != 0;
}

Rat funding_probability_exact(const Instance& instance, const RuleSpec& spec,
                              const BriberyQuery& query, const BriberyGuards& guards) {
    require_semantics(query, FlipSemantics::ExactlyR, "funding_probability_exact");
    const int64_t pairs = static_cast<int64_t>(instance.num_projects()) * instance.num_voters();
    if (query.radius > pairs) fail("radius exceeds the number of voter-project pairs");
    const Int total = binomial(static_cast<unsigned long>(pairs),
                               static_cast<unsigned long>(query.radius));

    Int count;
    bool solved = false;
    if (spec.rule == Rule::GreedyAV && spec.completion == Completion::None) {
        const bool unit_costs = std::all_of(instance.projects.begin(), instance.projects.end(),
                                            [](const Project& p) { return p.cost == 1; });
        if (unit_costs) {
            count = count_greedyav_unit_cost(instance, query, spec.tiebreak);
            solved = true;
        } else {
            try {
                count = count_greedyav_signature_dp(instance, query, spec.tiebreak, guards);
                solved = true;
            } catch (const GuardError&) {
            }
        }
    }
    if (!solved) count = count_bruteforce(instance, spec, query, guards);
    return make_rat(count, total);
}

Gadget gen_subset_sum_gadget(const GadgetSpec& spec) {
    const int n = static_cast<int>(spec.numbers.size());
    if (n < 1) fail("gadget needs at least one number");
    if (spec.subset_size < 1 || spec.subset_size > n)
        fail("subset size must be within 1..|U|");
    if (spec.target < 1) fail("gadget target must be positive");
    for (const Int& u : spec.numbers)
        if (u < 1) fail("gadget numbers must be positive");

    const int k = spec.subset_size;
    Int sum_u = 0;
    for (const Int& u : spec.numbers) sum_u += u;

    // shift so that only size-k subsets can hit the target
    const Int shift = 1 + spec.target + sum_u;
    std::vector<Int> numbers;
    numbers.reserve(n);
    Int sum_norm = 0;
    for (const Int& u : spec.numbers) {
        numbers.push_back(u + shift);
        sum_norm += numbers.back();
    }
    const Int target = spec.target + k * shift;
    const Int big = 3 * sum_norm;  // T
    if (3 * target > big)
        fail("normalized target " + target.get_str() + " exceeds T/3 = " +
             Int(big / 3).get_str() + "; certain no-instance, gadget bounds violated");

    Gadget gadget;
    gadget.normalized_numbers = numbers;
    gadget.normalized_target = target;
    gadget.radius = k;

    Instance& inst = gadget.instance;
    auto add_project = [&](const std::string& id, Int cost) {
        inst.projects.push_back({id, std::move(cost), inst.num_projects()});
    };
    for (int i = 0; i < n; ++i) add_project("x" + std::to_string(i + 1), big + numbers[i]);
    for (int i = 0; i < 2 * k + 1; ++i) add_project("y" + std::to_string(i + 1), big);
    for (int i = 0; i < k + 1; ++i) add_project("d" + std::to_string(i + 1), big - target + 1);
    add_project("p", big - target);
    gadget.target_project = inst.num_projects() - 1;

    inst.voters.push_back("v1");
    std::vector<int> vote;
    for (int c = n; c < inst.num_projects(); ++c) vote.push_back(c);  // everything but the x's
    inst.approvals.push_back(std::move(vote));
    inst.budget = k * big + big;
    inst.validate();
    return gadget;
}

bool sized_subset_sum_bruteforce(const std::vector<Int>& numbers, const Int& target,
                                 int subset_size) {
    const int n = static_cast<int>(numbers.size());
    if (subset_size < 0 || subset_size > n) return false;
    // enumerate k-subsets by increasing index
    auto recurse = [&](auto&& self, int next, int depth, const Int& sum) -> bool {
        if (sum > target) return false;  // numbers are positive
        if (depth == subset_size) return sum == target;
        for (int i = next; i <= n - (subset_size - depth); ++i)
            if (self(self, i + 1, depth + 1, Int(sum + numbers[i]))) return true;
        return false;
    };
    return recurse(recurse, 0, 0, Int(0));
}

}  // namespace pb
