#include "pb/robustness.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pb/rng.hpp"
#include "pb/version.hpp"

namespace pb {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

// probability as a 64-bit comparison threshold: event = (draw < val) | all.
// Quantization error is 2^-64; phi = 0 and p_i = 0 stay exact.
struct Thresh {
    uint64_t val = 0;
    bool all = false;

    bool hit(uint64_t draw) const { return all || draw < val; }
};

Thresh make_thresh(const Rat& prob) {
    if (prob <= 0) return {0, false};
    if (prob >= 1) return {0, true};
    Int scaled = (prob.get_num() << 64) / prob.get_den();
    return {mpz_get_ui(scaled.get_mpz_t()), false};
}

Rat resample_probability(int64_t vote_size, int num_projects, ResampleConvention convention) {
    if (vote_size == 0) return Rat(0);
    if (convention == ResampleConvention::ExpectationPreserving)
        return make_rat(static_cast<long>(vote_size), static_cast<long>(num_projects));
    return make_rat(1, static_cast<long>(vote_size));
}

}  // namespace

void NoiseConfig::validate() const {
    if (phi_grid.empty()) fail("phi grid is empty");
    for (size_t i = 0; i < phi_grid.size(); ++i) {
        if (phi_grid[i] < 0 || phi_grid[i] > 1) fail("phi values must lie in [0,1]");
        if (i > 0 && phi_grid[i] <= phi_grid[i - 1]) fail("phi grid must be strictly increasing");
    }
    if (samples_per_phi < 1) fail("samples_per_phi must be >= 1");
}

NoiseConfig NoiseConfig::default_grid(uint64_t seed) {
    NoiseConfig cfg;
    for (int k = 0; k <= 25; ++k) cfg.phi_grid.push_back(make_rat(k, 100));
    cfg.samples_per_phi = 100;
    cfg.master_seed = seed;
    return cfg;
}

NoiseConfig NoiseConfig::high_res_grid(uint64_t seed) {
    NoiseConfig cfg;
    for (int k = 0; k <= 2500; ++k) cfg.phi_grid.push_back(make_rat(k, 10000));
    cfg.samples_per_phi = 1000;
    cfg.master_seed = seed;
    return cfg;
}

std::vector<int> resample_vote(const std::vector<int>& approval_set, int num_projects,
                               const Rat& phi, ResampleConvention convention,
                               uint64_t stream_seed) {
    if (approval_set.empty()) return {};  // p_i = 0, unchanged surely
    const Thresh resample = make_thresh(phi);
    const Thresh approve =
        make_thresh(phi * resample_probability(approval_set.size(), num_projects, convention));
    SplitMix64 rng(stream_seed);
    std::vector<int> out;
    size_t next = 0;
    for (int c = 0; c < num_projects; ++c) {
        const uint64_t draw = rng.next();
        bool approved;
        if (resample.hit(draw)) {
            approved = approve.hit(draw);
        } else {
            approved = next < approval_set.size() && approval_set[next] == c;
        }
        if (next < approval_set.size() && approval_set[next] == c) ++next;
        if (approved) out.push_back(c);
    }
    return out;
}

namespace {

// per-voter thresholds for one phi value
struct VoterThresholds {
    std::vector<Thresh> resample;
    std::vector<Thresh> approve;
};

VoterThresholds make_voter_thresholds(const Instance& instance, const Rat& phi,
                                      ResampleConvention convention) {
    VoterThresholds t;
    const int n = instance.num_voters();
    t.resample.resize(n);
    t.approve.resize(n);
    for (int v = 0; v < n; ++v) {
        const int64_t vote_size = static_cast<int64_t>(instance.approvals[v].size());
        t.resample[v] = make_thresh(phi);
        t.approve[v] = make_thresh(
            phi * resample_probability(vote_size, instance.num_projects(), convention));
    }
    return t;
}

// one sample: resampled approvals written into scratch.approvals
void resample_into(const Instance& original, Instance& scratch, const VoterThresholds& t,
                   uint64_t master, uint64_t phi_index, uint64_t sample_index) {
    const int m = original.num_projects();
    for (int v = 0; v < original.num_voters(); ++v) {
        auto& vote = scratch.approvals[v];
        const auto& base = original.approvals[v];
        if (base.empty()) {
            vote.clear();
            continue;
        }
        vote.clear();
        SplitMix64 rng(derive_seed(master, phi_index, sample_index, static_cast<uint64_t>(v)));
        size_t next = 0;
        for (int c = 0; c < m; ++c) {
            const uint64_t draw = rng.next();
            bool approved;
            if (t.resample[v].hit(draw)) {
                approved = t.approve[v].hit(draw);
            } else {
                approved = next < base.size() && base[next] == c;
            }
            if (next < base.size() && base[next] == c) ++next;
            if (approved) vote.push_back(c);
        }
    }
}

// GreedyAV fast path: only the final scores matter, skip set materialization
void resample_scores(const Instance& original, std::vector<int64_t>& scores,
                     const VoterThresholds& t, uint64_t master, uint64_t phi_index,
                     uint64_t sample_index) {
    const int m = original.num_projects();
    std::fill(scores.begin(), scores.end(), 0);
    for (int v = 0; v < original.num_voters(); ++v) {
        const auto& base = original.approvals[v];
        if (base.empty()) continue;
        SplitMix64 rng(derive_seed(master, phi_index, sample_index, static_cast<uint64_t>(v)));
        size_t next = 0;
        const Thresh resample = t.resample[v];
        const Thresh approve = t.approve[v];
        for (int c = 0; c < m; ++c) {
            const uint64_t draw = rng.next();
            const bool original_bit = next < base.size() && base[next] == c;
            if (original_bit) ++next;
            if (resample.hit(draw)) {
                if (approve.hit(draw)) ++scores[c];
            } else if (original_bit) {
                ++scores[c];
            }
        }
    }
}

}  // namespace

RobustnessReport run_experiment(const Instance& instance, const RuleSpec& rule,
                                const NoiseConfig& config, ExecutionMode mode,
                                const std::string& instance_name) {
    config.validate();
    rule.validate();
    const int m = instance.num_projects();
    const int num_phi = static_cast<int>(config.phi_grid.size());
    const int samples = config.samples_per_phi;
    const bool greedy_fast = rule.rule == Rule::GreedyAV;

    RobustnessReport report;
    report.instance_name = instance_name;
    report.rule = rule;
    report.config = config;
    report.initial_outcome = run_rule(instance, rule).selected;

    std::vector<char> initial_mask(m, 0);
    for (int c : report.initial_outcome) initial_mask[c] = 1;
    const int64_t initial_size = static_cast<int64_t>(report.initial_outcome.size());
    Int initial_cost = 0;
    for (int c : report.initial_outcome) initial_cost += instance.projects[c].cost;

    report.curves.assign(m, FundingCurve{});
    for (int c = 0; c < m; ++c) {
        report.curves[c].project = c;
        report.curves[c].initially_funded = initial_mask[c] != 0;
    }

    std::vector<std::vector<char>> masks(samples, std::vector<char>(m, 0));

    for (int ip = 0; ip < num_phi; ++ip) {
        const auto thresholds =
            make_voter_thresholds(instance, config.phi_grid[ip], config.convention);

        auto run_sample = [&](int s, Instance& scratch, std::vector<int64_t>& scores) {
            if (greedy_fast) {
                resample_scores(instance, scores, thresholds, config.master_seed, ip, s);
                masks[s] = greedy_av_mask(instance, scores, rule.tiebreak);
            } else {
                resample_into(instance, scratch, thresholds, config.master_seed, ip, s);
                masks[s] = run_rule_mask(scratch, rule);
            }
        };

#ifdef _OPENMP
        if (mode == ExecutionMode::Parallel) {
            #pragma omp parallel
            {
                Instance scratch = instance;
                std::vector<int64_t> scores(m, 0);
                #pragma omp for schedule(dynamic)
                for (int s = 0; s < samples; ++s) run_sample(s, scratch, scores);
            }
        } else
#endif
        {
            Instance scratch = instance;
            std::vector<int64_t> scores(m, 0);
            for (int s = 0; s < samples; ++s) run_sample(s, scratch, scores);
        }

        // deterministic aggregation in sample order
        std::vector<int64_t> funded(m, 0);
        int64_t identical = 0;
        int64_t kept_total = 0;
        Int kept_cost_total = 0;
        for (int s = 0; s < samples; ++s) {
            const auto& mask = masks[s];
            bool same = true;
            int64_t kept = 0;
            for (int c = 0; c < m; ++c) {
                if (mask[c]) ++funded[c];
                if (mask[c] != initial_mask[c]) same = false;
                if (mask[c] && initial_mask[c]) {
                    ++kept;
                    kept_cost_total += instance.projects[c].cost;
                }
            }
            if (same) ++identical;
            kept_total += kept;
        }

        const Rat sample_count(static_cast<long>(samples));
        for (int c = 0; c < m; ++c)
            report.curves[c].probabilities.push_back(
                make_rat(static_cast<long>(funded[c]), samples));
        report.identity_rate.push_back(make_rat(static_cast<long>(identical), samples));
        report.kept_fraction.push_back(
            initial_size == 0
                ? Rat(1)
                : make_rat(Int(static_cast<long>(kept_total)),
                           Int(static_cast<long>(samples)) * Int(initial_size)));
        report.kept_budget_fraction.push_back(
            initial_cost == 0 ? Rat(1)
                              : make_rat(kept_cost_total,
                                         Int(static_cast<long>(samples)) * initial_cost));

        Rat min_prob(1);
        bool any_funded = false;
        for (int c = 0; c < m; ++c) {
            if (!initial_mask[c]) continue;
            const Rat& prob = report.curves[c].probabilities.back();
            if (!any_funded || prob < min_prob) min_prob = prob;
            any_funded = true;
        }
        report.min_funded_probability.push_back(any_funded ? min_prob : Rat(1));
    }

    // least robust initially funded project, fixed at the top grid phi
    report.least_robust_project = -1;
    {
        Rat best;
        for (int c = 0; c < m; ++c) {
            if (!initial_mask[c]) continue;
            const Rat& prob = report.curves[c].probabilities.back();
            if (report.least_robust_project < 0 || prob < best ||
                (prob == best && instance.projects[c].tiebreak_rank <
                                     instance.projects[report.least_robust_project].tiebreak_rank)) {
                report.least_robust_project = c;
                best = prob;
            }
        }
    }

    Rat threshold;
    report.threshold_above_grid = !winner_threshold(report, threshold);
    if (!report.threshold_above_grid) report.threshold = threshold;
    return report;
}

bool winner_threshold(const RobustnessReport& report, Rat& out_phi) {
    const Rat half = make_rat(1, 2);
    for (size_t i = 0; i < report.identity_rate.size(); ++i) {
        if (report.identity_rate[i] < half) {  // strictly more than half differ
            out_phi = report.config.phi_grid[i];
            return true;
        }
    }
    return false;
}

ProjectKind classify_project(const FundingCurve& curve) {
    if (curve.probabilities.empty()) fail("empty funding curve");
    // mirror initially unfunded curves so both cases start near 1
    std::vector<Rat> series;
    series.reserve(curve.probabilities.size());
    for (const Rat& p : curve.probabilities)
        series.push_back(curve.initially_funded ? p : Rat(1) - p);

    const Rat band_lo = make_rat(9, 10);
    bool robust = true;
    for (const Rat& p : series)
        if (p < band_lo) robust = false;
    if (robust) return ProjectKind::Robust;

    const size_t count = series.size();
    const size_t third = (count + 2) / 3;
    Rat tail_sum(0);
    for (size_t i = count - third; i < count; ++i) tail_sum += series[i];
    const Rat tail_mean = tail_sum / Rat(static_cast<long>(third));

    Rat low = series[0];
    for (const Rat& p : series)
        if (p < low) low = p;
    const Rat rise = series.back() - low;
    const bool recovering = rise >= make_rat(3, 20);

    if (tail_mean < make_rat(7, 20)) return recovering ? ProjectKind::Recovering : ProjectKind::Declining;
    if (tail_mean <= make_rat(13, 20)) return recovering ? ProjectKind::Recovering : ProjectKind::Plateau;
    return ProjectKind::Recovering;
}

std::string to_string(ProjectKind kind) {
    switch (kind) {
        case ProjectKind::Robust: return "robust";
        case ProjectKind::Declining: return "declining";
        case ProjectKind::Plateau: return "plateau";
        case ProjectKind::Recovering: return "recovering";
    }
    return "?";
}

FeatureTable feature_table(const std::vector<const Instance*>& instances,
                           const std::vector<const RobustnessReport*>& reports) {
    if (instances.size() != reports.size())
        fail("feature_table: instances and reports must be aligned");
    FeatureTable table;
    for (size_t i = 0; i < reports.size(); ++i) {
        const Instance& inst = *instances[i];
        const RobustnessReport& report = *reports[i];

        InstanceFeatureRow row;
        row.instance_name = report.instance_name;
        row.rule = report.rule.to_string();
        row.voters = inst.num_voters();
        row.projects = inst.num_projects();
        row.budget = inst.budget;
        int64_t total_len = 0;
        for (const auto& vote : inst.approvals) total_len += static_cast<int64_t>(vote.size());
        row.mean_vote_length = make_rat(Int(total_len), Int(inst.num_voters()));
        row.voter_project_ratio = make_rat(Int(inst.num_voters()), Int(inst.num_projects()));
        row.threshold_above_grid = report.threshold_above_grid;
        row.threshold = report.threshold;
        table.instances.push_back(std::move(row));

        if (report.initial_outcome.empty()) continue;
        const auto scores = inst.approval_scores();

        // feature value of an initially funded project, as an exact rational
        auto feature_value = [&](const std::string& feature, int c) -> Rat {
            if (feature == "approvals") return Rat(static_cast<long>(scores[c]));
            if (feature == "cost") return Rat(inst.projects[c].cost);
            return make_rat(Int(static_cast<long>(scores[c])), inst.projects[c].cost);
        };
        for (const std::string feature : {"approvals", "cost", "approvals_per_cost"}) {
            for (const bool want_max : {false, true}) {
                int pick = -1;
                Rat best;
                for (int c : report.initial_outcome) {
                    const Rat value = feature_value(feature, c);
                    const bool better = pick < 0 || (want_max ? value > best : value < best) ||
                                        (value == best &&
                                         inst.projects[c].tiebreak_rank <
                                             inst.projects[pick].tiebreak_rank);
                    if (better) {
                        pick = c;
                        best = value;
                    }
                }
                ProjectFeatureRow prow;
                prow.instance_name = report.instance_name;
                prow.rule = report.rule.to_string();
                prow.feature = feature;
                prow.extreme = want_max ? "max" : "min";
                prow.project_id = inst.projects[pick].id;
                prow.probabilities = report.curves[pick].probabilities;
                table.projects.push_back(std::move(prow));
            }
        }
    }
    return table;
}

std::string curves_csv(const Instance& instance, const RobustnessReport& report) {
    std::ostringstream out;
    out << "phi,project_id,funding_probability,initially_funded\n";
    for (size_t ip = 0; ip < report.config.phi_grid.size(); ++ip) {
        const std::string phi = format_decimal(report.config.phi_grid[ip]);
        for (int c = 0; c < instance.num_projects(); ++c) {
            const auto& curve = report.curves[c];
            out << phi << ',' << instance.projects[c].id << ','
                << format_decimal(curve.probabilities[ip]) << ','
                << (curve.initially_funded ? '1' : '0') << '\n';
        }
    }
    return out.str();
}

std::string aggregates_csv(const RobustnessReport& report) {
    std::ostringstream out;
    out << "phi,identity_rate,kept_fraction,kept_budget_fraction,least_robust_funded_probability\n";
    for (size_t ip = 0; ip < report.config.phi_grid.size(); ++ip) {
        const Rat least = report.least_robust_project >= 0
                              ? report.curves[report.least_robust_project].probabilities[ip]
                              : Rat(1);
        out << format_decimal(report.config.phi_grid[ip]) << ','
            << format_decimal(report.identity_rate[ip]) << ','
            << format_decimal(report.kept_fraction[ip]) << ','
            << format_decimal(report.kept_budget_fraction[ip]) << ','
            << format_decimal(least) << '\n';
    }
    return out.str();
}

std::string report_json(const Instance& instance, const RobustnessReport& report) {
    nlohmann::ordered_json doc;
    doc["version"] = kVersion;
    doc["instance"] = report.instance_name;
    doc["rule"] = report.rule.to_string();
    nlohmann::ordered_json cfg;
    {
        std::vector<std::string> grid;
        for (const Rat& phi : report.config.phi_grid) grid.push_back(format_decimal(phi));
        cfg["phi_grid"] = grid;
        cfg["samples_per_phi"] = report.config.samples_per_phi;
        cfg["master_seed"] = report.config.master_seed;
        cfg["resample_convention"] =
            report.config.convention == ResampleConvention::ExpectationPreserving
                ? "expectation-preserving"
                : "literal-inverse";
    }
    doc["config"] = cfg;
    {
        std::vector<std::string> ids;
        for (int c : report.initial_outcome) ids.push_back(instance.projects[c].id);
        doc["initial_outcome"] = ids;
    }
    if (report.threshold_above_grid)
        doc["winner_threshold"] = nullptr;
    else
        doc["winner_threshold"] = format_decimal(report.threshold);
    doc["threshold_above_grid"] = report.threshold_above_grid;
    if (report.least_robust_project >= 0)
        doc["least_robust_project"] = instance.projects[report.least_robust_project].id;
    else
        doc["least_robust_project"] = nullptr;

    auto rat_list = [](const std::vector<Rat>& values) {
        std::vector<std::string> out;
        out.reserve(values.size());
        for (const Rat& v : values) out.push_back(format_decimal(v));
        return out;
    };
    doc["identity_rate"] = rat_list(report.identity_rate);
    doc["kept_fraction"] = rat_list(report.kept_fraction);
    doc["kept_budget_fraction"] = rat_list(report.kept_budget_fraction);
    doc["min_funded_probability"] = rat_list(report.min_funded_probability);

    nlohmann::ordered_json curves = nlohmann::ordered_json::array();
    for (int c = 0; c < instance.num_projects(); ++c) {
        nlohmann::ordered_json entry;
        entry["project_id"] = instance.projects[c].id;
        entry["initially_funded"] = report.curves[c].initially_funded;
        entry["type"] = to_string(classify_project(report.curves[c]));
        entry["probabilities"] = rat_list(report.curves[c].probabilities);
        curves.push_back(std::move(entry));
    }
    doc["curves"] = std::move(curves);
    return doc.dump(2) + "\n";
}

}  // namespace pb
