#pragma once

// Random-instance generation shared by the unit tests and the acceptance
// suite. Everything is driven by an explicit SplitMix64 so runs are
// reproducible from a single seed.

#include <vector>

#include "pb/core.hpp"
#include "pb/rng.hpp"

struct GenParams {
    int max_projects = 5;
    int max_voters = 4;
    long max_cost = 8;     // costs uniform in [1, max_cost]
    long min_budget = 1;   // budget uniform in [min_budget, max_budget]
    long max_budget = 20;
    bool unit_costs = false;
};

inline pb::Instance random_instance(pb::SplitMix64& rng, const GenParams& params) {
    const int m = 1 + static_cast<int>(rng.next_below(params.max_projects));
    const int n = 1 + static_cast<int>(rng.next_below(params.max_voters));
    std::vector<pb::Int> costs;
    costs.reserve(m);
    for (int i = 0; i < m; ++i)
        costs.emplace_back(params.unit_costs
                               ? 1L
                               : 1L + static_cast<long>(rng.next_below(params.max_cost)));
    std::vector<std::vector<int>> approvals(n);
    for (int v = 0; v < n; ++v)
        for (int c = 0; c < m; ++c)
            if (rng.next() & 1) approvals[v].push_back(c);
    const long span = params.max_budget - params.min_budget + 1;
    const pb::Int budget = params.min_budget + static_cast<long>(rng.next_below(span));
    return pb::make_instance(costs, approvals, budget);
}
