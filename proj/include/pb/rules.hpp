#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pb/core.hpp"

namespace pb {

enum class Rule { GreedyAV, GreedyCost, Phragmen, MesApr, MesCost };
enum class Completion { None, Add1, Add1GreedyAV, Epsilon, GreedyAV };
enum class MesUtility { Approval, Cost };

struct RuleSpec {
    Rule rule = Rule::GreedyAV;
    TieBreak tiebreak = TieBreak::OrderBased;     // GreedyAV only; others order-based
    Completion completion = Completion::None;     // MES rules only
    TieBreak ratio_ties = TieBreak::OrderBased;   // GreedyCost equal-ratio ties; the
                                                  // experiments use OrderBased, CheaperFirst
                                                  // falls back to order among equal costs
    void validate() const;                        // throws std::invalid_argument
    std::string to_string() const;
};

RuleSpec parse_rule_spec(const std::string& text);  // e.g. "mes-cost:add1-greedyav"

/// Considers projects by non-increasing approval score (ties per policy,
/// zero-approval projects included, last); adds each project that fits the
/// remaining budget. Skipped projects are never revisited.
Outcome greedy_av(const Instance& instance, TieBreak tiebreak);

/// As greedy_av but ordered by exact score/cost ratio, descending.
Outcome greedy_cost(const Instance& instance, TieBreak ratio_ties = TieBreak::OrderBased);

/// Continuous buying process: voters earn at unit rate, a project is bought
/// as soon as its supporters' balances cover its cost (supporters reset to
/// zero). Projects that no longer fit the remaining budget are dropped for
/// good; stops when no approved project fits.
Outcome phragmen(const Instance& instance);

/// Method of Equal Shares. Endowment B/n per voter; repeatedly selects the
/// project q-affordable for the smallest q (ties by order), charging each
/// supporter min(balance, utility*q). Exact rationals throughout.
Outcome mes(const Instance& instance, MesUtility utility);

/// Rule dispatch including the MES completion methods.
Outcome run_rule(const Instance& instance, const RuleSpec& spec);

// ---- internals shared with the bribery / robustness hot paths ----

// tie_prefers: does project a beat project b when their scores tie?
bool tie_prefers(const Instance& instance, TieBreak tiebreak, int a, int b);

// GreedyAV consideration order for the given final scores.
std::vector<int> greedy_av_order(const Instance& instance, const std::vector<int64_t>& scores,
                                 TieBreak tiebreak);

// Selection pass given a consideration order; returns selected mask.
std::vector<char> greedy_pass(const Instance& instance, const std::vector<int>& order,
                              const Int& budget);

// GreedyAV selected-set mask straight from scores; the robustness fast path.
std::vector<char> greedy_av_mask(const Instance& instance, const std::vector<int64_t>& scores,
                                 TieBreak tiebreak);

// Full rule evaluation returning only the selected mask.
std::vector<char> run_rule_mask(const Instance& instance, const RuleSpec& spec);

int64_t add1_iteration_cap();  // hard cap on Add1 budget increments (500)

}  // namespace pb
