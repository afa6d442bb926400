#include "pb/core.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace pb {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

int Instance::project_index(const std::string& id) const {
    for (int i = 0; i < num_projects(); ++i)
        if (projects[i].id == id) return i;
    fail("unknown project id: " + id);
}

int Instance::voter_index(const std::string& id) const {
    for (int i = 0; i < num_voters(); ++i)
        if (voters[i] == id) return i;
    fail("unknown voter id: " + id);
}

bool Instance::approves(int voter, int project) const {
    const auto& a = approvals[voter];
    return std::binary_search(a.begin(), a.end(), project);
}

std::vector<std::vector<int>> Instance::approvers_by_project() const {
    std::vector<std::vector<int>> by_project(projects.size());
    for (int v = 0; v < num_voters(); ++v)
        for (int c : approvals[v]) by_project[c].push_back(v);
    return by_project;
}

std::vector<int64_t> Instance::approval_scores() const {
    std::vector<int64_t> scores(projects.size(), 0);
    for (const auto& vote : approvals)
        for (int c : vote) ++scores[c];
    return scores;
}

void Instance::validate() const {
    const int m = num_projects();
    const int n = num_voters();
    if (m < 1) fail("instance needs at least one project");
    if (n < 1) fail("instance needs at least one voter");
    if (budget < 0) fail("negative budget");
    if (approvals.size() != static_cast<size_t>(n)) fail("approvals size != voter count");

    std::set<std::string> ids;
    std::vector<char> rank_seen(m, 0);
    for (const auto& p : projects) {
        if (p.cost < 1) fail("project " + p.id + " has cost < 1");
        if (!ids.insert(p.id).second) fail("duplicate project id: " + p.id);
        if (p.tiebreak_rank < 0 || p.tiebreak_rank >= m || rank_seen[p.tiebreak_rank])
            fail("tiebreak ranks must be a permutation of 0..m-1");
        rank_seen[p.tiebreak_rank] = 1;
    }
    std::set<std::string> vids(voters.begin(), voters.end());
    if (vids.size() != voters.size()) fail("duplicate voter id");
    for (const auto& vote : approvals) {
        for (size_t k = 0; k < vote.size(); ++k) {
            if (vote[k] < 0 || vote[k] >= m) fail("approval references unknown project");
            if (k > 0 && vote[k] <= vote[k - 1]) fail("approval set not sorted / has duplicates");
        }
    }
}

Instance make_instance(const std::vector<Int>& costs,
                       const std::vector<std::vector<int>>& approvals, Int budget) {
    Instance e;
    e.budget = std::move(budget);
    e.projects.reserve(costs.size());
    for (size_t i = 0; i < costs.size(); ++i)
        e.projects.push_back({"p" + std::to_string(i), costs[i], static_cast<int>(i)});
    e.voters.reserve(approvals.size());
    for (size_t v = 0; v < approvals.size(); ++v) e.voters.push_back("v" + std::to_string(v));
    e.approvals = approvals;
    for (auto& vote : e.approvals) std::sort(vote.begin(), vote.end());
    e.validate();
    return e;
}

bool Outcome::contains(int project) const {
    return std::binary_search(selected.begin(), selected.end(), project);
}

Outcome make_outcome(const Instance& instance, std::vector<SelectionStep> trace) {
    Outcome out;
    out.trace = std::move(trace);
    for (size_t i = 0; i < out.trace.size(); ++i) {
        out.trace[i].step_index = static_cast<int>(i);
        out.selected.push_back(out.trace[i].project);
        out.total_cost += instance.projects[out.trace[i].project].cost;
    }
    std::sort(out.selected.begin(), out.selected.end());
    return out;
}

int64_t approval_score(const Instance& instance, int project) {
    if (project < 0 || project >= instance.num_projects()) fail("project index out of range");
    int64_t score = 0;
    for (int v = 0; v < instance.num_voters(); ++v)
        if (instance.approves(v, project)) ++score;
    return score;
}

int64_t approval_score(const Instance& instance, const std::string& project_id) {
    return approval_score(instance, instance.project_index(project_id));
}

void flip_in_place(Instance& instance, int voter, int project) {
    auto& vote = instance.approvals[voter];
    auto it = std::lower_bound(vote.begin(), vote.end(), project);
    if (it != vote.end() && *it == project)
        vote.erase(it);
    else
        vote.insert(it, project);
}

Instance flip(const Instance& instance, int voter, int project) {
    if (voter < 0 || voter >= instance.num_voters()) fail("voter index out of range");
    if (project < 0 || project >= instance.num_projects()) fail("project index out of range");
    Instance out = instance;
    flip_in_place(out, voter, project);
    return out;
}

Instance flip(const Instance& instance, const std::string& voter_id, const std::string& project_id) {
    return flip(instance, instance.voter_index(voter_id), instance.project_index(project_id));
}

bool is_exhaustive(const Instance& instance, const std::vector<int>& selected_set,
                   bool include_unapproved) {
    Int spent = 0;
    std::vector<char> in_set(instance.num_projects(), 0);
    for (int c : selected_set) {
        spent += instance.projects[c].cost;
        in_set[c] = 1;
    }
    if (spent > instance.budget) fail("selected set is not feasible");
    const Int remaining = instance.budget - spent;
    const auto scores = instance.approval_scores();
    for (int c = 0; c < instance.num_projects(); ++c) {
        if (in_set[c]) continue;
        if (!include_unapproved && scores[c] == 0) continue;
        if (instance.projects[c].cost <= remaining) return false;
    }
    return true;
}

}  // namespace pb
