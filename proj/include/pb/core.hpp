#pragma once

#include <string>
#include <vector>

#include "pb/exact.hpp"

namespace pb {

enum class TieBreak { OrderBased, CheaperFirst };

struct Project {
    std::string id;
    Int cost;           // >= 1
    int tiebreak_rank;  // unique, contiguous 0..m-1; 0 = most preferred
};

// A participatory budgeting instance: projects with costs, an ordered list
// of voters with approval sets, and a budget. Approval sets are stored as
// sorted vectors of project indices (positions in `projects`, not ranks).
// Instances are immutable values once built; all operations that "modify"
// one return a fresh copy.
struct Instance {
    std::vector<Project> projects;
    std::vector<std::string> voters;
    std::vector<std::vector<int>> approvals;  // per voter, sorted indices
    Int budget;

    int num_projects() const { return static_cast<int>(projects.size()); }
    int num_voters() const { return static_cast<int>(voters.size()); }

    int project_index(const std::string& id) const;  // throws on unknown id
    int voter_index(const std::string& id) const;

    bool approves(int voter, int project) const;

    // per-project list of approving voter indices
    std::vector<std::vector<int>> approvers_by_project() const;
    std::vector<int64_t> approval_scores() const;

    // Checks all Instance invariants (unique ids, contiguous ranks,
    // positive costs, sorted duplicate-free approvals, in-range indices).
    // Throws std::invalid_argument with a description on violation.
    void validate() const;
};

// Convenience builder: projects get tiebreak_rank = position in `costs`,
// ids "p0","p1",..., voters "v0","v1",... Used heavily by tests.
Instance make_instance(const std::vector<Int>& costs,
                       const std::vector<std::vector<int>>& approvals, Int budget);

struct SelectionStep {
    int project = -1;
    int step_index = 0;
    std::string phase;  // which phase of the rule selected this project
    Rat price;          // greedy: score or score/cost ratio; MES: q; Phragmen: purchase time
    std::vector<std::pair<int, Rat>> payments;  // MES/Phragmen: (voter, amount)
};

struct CompletionInfo {
    bool used = false;
    std::string method;
    int add1_steps = 0;
    bool cap_hit = false;
    Rat epsilon = 0;
};

struct Outcome {
    std::vector<int> selected;  // sorted project indices
    std::vector<SelectionStep> trace;
    Int total_cost = 0;
    CompletionInfo completion;

    bool contains(int project) const;
};

Outcome make_outcome(const Instance& instance, std::vector<SelectionStep> trace);

/// |A(c)|: number of voters approving the project.
int64_t approval_score(const Instance& instance, const std::string& project_id);
int64_t approval_score(const Instance& instance, int project);

/// Toggles one voter's approval of one project; the input is left unchanged.
Instance flip(const Instance& instance, const std::string& voter_id, const std::string& project_id);
Instance flip(const Instance& instance, int voter, int project);

// In-place toggle on a scratch instance (bribery enumeration hot path).
void flip_in_place(Instance& instance, int voter, int project);

/// True iff no unselected project fits the remaining budget. Unless
/// include_unapproved is set, projects with zero approvals are ignored.
bool is_exhaustive(const Instance& instance, const std::vector<int>& selected_set,
                   bool include_unapproved);

}  // namespace pb
