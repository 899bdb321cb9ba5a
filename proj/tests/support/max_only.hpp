#pragma once

// Deterministic search with no chance layer: every year is a no-churn year.
// Written directly against the economics functions, for degeneracy checks.

#include <algorithm>
#include <limits>
#include <vector>

#include "migplan/economics.hpp"
#include "migplan/expectimax.hpp"

namespace migplan::testing {

struct MaxOnlyResult {
    Money value = 0;
    std::vector<MigrationStep> path;
};

inline MaxOnlyResult max_only(const ScenarioConfig& cfg, const Technology& tech, Year year) {
    MaxOnlyResult best;
    best.value = -std::numeric_limits<Money>::infinity();
    std::vector<const Technology*> options{&tech};
    for (const auto* t : possible_migrations(tech, cfg)) options.push_back(t);
    for (const auto* next : options) {
        MaxOnlyResult r;
        const Year y = year + 1;
        const bool stop = in_goal_set(*next, cfg.goal, cfg.goal_rate) || y >= cfg.window_end();
        if (stop) {
            r.value = terminal_value(*next, y, cfg, 0);
        } else {
            r = max_only(cfg, *next, y);
        }
        if (next != &tech) {
            r.value -= migration_capex_pv(migration_capex(tech, *next, cfg).total, year, cfg);
            r.path.insert(r.path.begin(), MigrationStep{y, next->id});
        }
        if (r.value > best.value) best = r;
    }
    best.value += discounted_net_flow(cfg, tech, year, 0);
    return best;
}

inline MaxOnlyResult max_only(const ScenarioConfig& cfg) {
    return max_only(cfg, *cfg.graph.find(cfg.start_technology), cfg.t_start);
}

}  // namespace migplan::testing
