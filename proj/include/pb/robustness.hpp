#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pb/core.hpp"
#include "pb/rules.hpp"

namespace pb {

enum class ResampleConvention {
    // p_i = |A(v_i)| / m: keeps the expected number of approved projects
    // unchanged, matching the stated property of the noise model
    ExpectationPreserving,
    // p_i = 1 / |A(v_i)|: the literal text of the model definition
    LiteralInverse,
};

enum class ExecutionMode { Serial, Parallel };

struct NoiseConfig {
    std::vector<Rat> phi_grid;      // strictly increasing, within [0,1]
    int samples_per_phi = 100;
    uint64_t master_seed = 0;
    ResampleConvention convention = ResampleConvention::ExpectationPreserving;

    void validate() const;
    static NoiseConfig default_grid(uint64_t seed = 0);   // {0, 0.01, ..., 0.25} x 100
    static NoiseConfig high_res_grid(uint64_t seed = 0);  // {0, 0.0001, ..., 0.25} x 1000
};

struct FundingCurve {
    int project = -1;
    bool initially_funded = false;
    std::vector<Rat> probabilities;  // one per grid phi, multiples of 1/samples
};

// AboveGrid is encoded as threshold_above_grid = true.
struct RobustnessReport {
    std::string instance_name;
    RuleSpec rule;
    NoiseConfig config;
    std::vector<int> initial_outcome;  // sorted project indices
    std::vector<FundingCurve> curves;  // one per project, project-index order
    std::vector<Rat> identity_rate;          // per phi
    std::vector<Rat> kept_fraction;          // per phi, mean |W0 ∩ Ws| / |W0|
    std::vector<Rat> kept_budget_fraction;   // per phi, mean cost(W0 ∩ Ws) / cost(W0)
    std::vector<Rat> min_funded_probability;  // per phi, min over initially funded
    int least_robust_project = -1;  // initially funded, lowest probability at the top phi
    bool threshold_above_grid = true;
    Rat threshold;  // valid when !threshold_above_grid
};

// Resamples one approval set: each project kept with probability 1-phi,
// otherwise approved with probability p_i (convention above). Empty votes
// have p_i = 0 and stay empty surely.
std::vector<int> resample_vote(const std::vector<int>& approval_set, int num_projects,
                               const Rat& phi, ResampleConvention convention,
                               uint64_t stream_seed);

// The full sampling pipeline: initial outcome, per-(phi, sample) resampled
// rule runs, funding curves, identity/kept aggregates and the 50%-winner
// threshold. (phi, sample, voter) cells draw from hash-derived streams, so
// the parallel kernel and the serial reference produce identical reports.
RobustnessReport run_experiment(const Instance& instance, const RuleSpec& rule,
                                const NoiseConfig& config,
                                ExecutionMode mode = ExecutionMode::Parallel,
                                const std::string& instance_name = "");

// Smallest grid phi where a strict majority of samples changed the outcome;
// returns false (above grid) when no such phi exists.
bool winner_threshold(const RobustnessReport& report, Rat& out_phi);

enum class ProjectKind { Robust, Declining, Plateau, Recovering };

// The funding-probability typology: Robust curves never leave the band near
// their initial value; otherwise the final-third mean and the rise from the
// curve minimum decide between Declining, Plateau and Recovering.
ProjectKind classify_project(const FundingCurve& curve);

std::string to_string(ProjectKind kind);

struct InstanceFeatureRow {
    std::string instance_name;
    std::string rule;
    int64_t voters = 0;
    int64_t projects = 0;
    Int budget;
    Rat mean_vote_length;
    Rat voter_project_ratio;
    bool threshold_above_grid = true;
    Rat threshold;
};

struct ProjectFeatureRow {
    std::string instance_name;
    std::string rule;
    std::string feature;  // approvals | cost | approvals_per_cost
    std::string extreme;  // min | max
    std::string project_id;
    std::vector<Rat> probabilities;  // per phi
};

struct FeatureTable {
    std::vector<InstanceFeatureRow> instances;
    std::vector<ProjectFeatureRow> projects;
};

// Per-(instance, rule) feature rows plus curves of the extremal initially
// funded projects (min/max approvals, cost, approvals-to-cost ratio).
FeatureTable feature_table(const std::vector<const Instance*>& instances,
                           const std::vector<const RobustnessReport*>& reports);

// ---- pinned export formats ----
std::string curves_csv(const Instance& instance, const RobustnessReport& report);
std::string aggregates_csv(const RobustnessReport& report);
std::string report_json(const Instance& instance, const RobustnessReport& report);

}  // namespace pb
