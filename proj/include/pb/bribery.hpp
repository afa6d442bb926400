#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pb/core.hpp"
#include "pb/rules.hpp"

namespace pb {

enum class FlipSemantics { ExactlyR, AtMostR };

struct BriberyQuery {
    int target = 0;  // project index
    int64_t radius = 0;
    FlipSemantics semantics = FlipSemantics::ExactlyR;
};

struct BriberyGuards {
    // max number of rule evaluations a brute-force enumeration may perform
    uint64_t enumeration_cap = 20'000'000;
    // max number of DP table entries for the signature DP
    uint64_t signature_entries_cap = 1u << 24;
    // max m for the orderings DP (m! orderings)
    int ordering_max_projects = 8;
};

// A "way" is an r-subset of (voter, project) pairs, each toggled once;
// counts are over these subsets, matching the x / (mn choose r) probability
// reading. Enumerates every subset, runs the rule, counts instances where
// the target is selected. OpenMP-parallel over the first toggled pair; the
// serial reference path is kept for testing (parallel=false).
Int count_bruteforce(const Instance& instance, const RuleSpec& spec, const BriberyQuery& query,
                     const BriberyGuards& guards = {}, bool parallel = true);

// True iff some flip set of size <= r makes the target selected.
bool decide_bruteforce(const Instance& instance, const RuleSpec& spec, const BriberyQuery& query,
                       const BriberyGuards& guards = {}, bool parallel = true);

// Signature dynamic program over GreedyAV runs: states are functions
// C -> {0,1,2} recording which projects were examined and which got funded,
// plus the last considered project, its final score, and flips used.
// Exponential in m (3^m signatures), guarded.
Int count_greedyav_signature_dp(const Instance& instance, const BriberyQuery& query,
                                TieBreak tiebreak, const BriberyGuards& guards = {});

// Counts per consideration order: enumerates all m! project orderings, and
// for each one that makes GreedyAV select the target, counts the flip
// assignments realizing exactly that order. Polynomial memory.
Int count_greedyav_ordering_dp(const Instance& instance, const BriberyQuery& query,
                               TieBreak tiebreak, const BriberyGuards& guards = {});

// Polynomial-time counting when every project costs exactly 1.
Int count_greedyav_unit_cost(const Instance& instance, const BriberyQuery& query,
                             TieBreak tiebreak);

// Decision under cheaper-first tie-breaking: exhaustive search when r < n,
// otherwise approve the target everywhere and strip approvals from the most
// costly all-approved projects that precede it.
bool decide_greedyav_cheaper_first(const Instance& instance, const BriberyQuery& query,
                                   const BriberyGuards& guards = {});

// count / (mn choose r), exact.
Rat funding_probability_exact(const Instance& instance, const RuleSpec& spec,
                              const BriberyQuery& query, const BriberyGuards& guards = {});

// Sized-Subset-Sum test-instance generator: do k numbers from U sum to t?
struct GadgetSpec {
    std::vector<Int> numbers;  // U, all >= 1
    Int target = 0;            // t
    int subset_size = 0;       // k, 1 <= k <= |U|
};

struct Gadget {
    Instance instance;
    int target_project = 0;  // p
    int64_t radius = 0;      // r = k
    std::vector<Int> normalized_numbers;
    Int normalized_target = 0;
};

// Builds the single-voter GreedyAV instance whose Flip-Bribery answer at
// radius k matches the Sized-Subset-Sum answer: x-projects carry the
// numbers (cost T + u_i), blockers y_1..y_{2k+1} (cost T) and
// d_1..d_{k+1} (cost T - t + 1) surround the target p (cost T - t),
// with budget kT + T.
Gadget gen_subset_sum_gadget(const GadgetSpec& spec);

// Brute-force Sized-Subset-Sum oracle (enumerates k-subsets).
bool sized_subset_sum_bruteforce(const std::vector<Int>& numbers, const Int& target,
                                 int subset_size);

}  // namespace pb
