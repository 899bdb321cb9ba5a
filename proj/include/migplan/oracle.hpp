#pragma once

// Brute-force reference solver for small instances.
//
// Enumerates every deterministic contingency policy (one action per reachable
// (year, tech, gamma) decision state) and scores each one by walking every
// churn sequence it can produce, summing the discounted cash flows of that
// trajectory. Shares only the per-year economics with the search module; no
// value recursion is reused.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "migplan/economics.hpp"
#include "migplan/expectimax.hpp"
#include "migplan/model.hpp"

namespace migplan {

struct OracleLimits {
    int max_decision_years = 5;
    std::size_t max_technologies = 4;
    std::uint64_t max_policies = 1'000'000;
};

/// One churn outcome per chance level walked on a trajectory.
struct ChurnSequence {
    std::vector<int> bits;
    double probability = 1.0;
    Money npv = 0;            // NPV of the trajectory under this sequence
    std::vector<std::string> technologies;  // technology held at each chance level
};

struct OracleResult {
    Money expected_npv = 0;
    Policy policy;
    std::vector<MigrationStep> path;
    std::uint64_t policies_enumerated = 0;
};

namespace detail {

/// Dense per-instance tables of undiscounted amounts.
class OracleTables {
public:
    explicit OracleTables(const ScenarioConfig& cfg) : cfg(cfg) {
        if (auto v = validate_scenario(cfg); !v.empty()) {
            throw PlanError(ErrorCode::validation_failed, v.front().code + ": " + v.front().message, v);
        }
        const auto& nodes = cfg.graph.nodes;
        n = nodes.size();
        start = *cfg.graph.index_of(cfg.start_technology);
        const int years = cfg.t_nw + 1;
        discount.resize(years);
        for (int k = 0; k < years; ++k) discount[k] = std::pow(1.0 + cfg.discount_rate, k);
        net.assign(n, std::vector<std::array<Money, 2>>(years));
        for (std::size_t s = 0; s < n; ++s) {
            for (int k = 0; k < years; ++k) {
                const Year y = cfg.t_start + k;
                for (int g = 0; g < 2; ++g) {
                    net[s][k][g] = yearly_revenue(cfg, nodes[s], y, g) - opex(nodes[s], y, cfg);
                }
            }
        }
        absorbing.resize(n);
        actions.resize(n);
        capex.assign(n, std::vector<Money>(n, 0.0));
        for (std::size_t s = 0; s < n; ++s) {
            absorbing[s] = in_goal_set(nodes[s], cfg.goal, cfg.goal_rate);
            actions[s].push_back(s);
            for (const auto* t : possible_migrations(nodes[s], cfg)) {
                const std::size_t c = *cfg.graph.index_of(t->id);
                actions[s].push_back(c);
                capex[s][c] = migration_capex(nodes[s], nodes[c], cfg).total;
            }
        }
    }

    double pv(Money amount, int k) const { return k == 0 ? amount : amount / discount[k]; }

    const ScenarioConfig& cfg;
    std::size_t n = 0;
    std::size_t start = 0;
    std::vector<double> discount;
    std::vector<std::vector<std::array<Money, 2>>> net;
    std::vector<char> absorbing;
    std::vector<std::vector<std::size_t>> actions;
    std::vector<std::vector<Money>> capex;
};

struct OracleDecision {
    int level;  // years since T_start
    std::size_t tech;
    int gamma;
    friend auto operator<=>(const OracleDecision&, const OracleDecision&) = default;
};

using OraclePolicy = std::map<OracleDecision, std::size_t>;

class PolicyWalker {
public:
    PolicyWalker(const OracleTables& t, const OraclePolicy& p) : t_(t), p_(p) {}

    /// Walks every churn sequence the policy can produce.
    void walk(const std::function<void(const ChurnSequence&)>& visit) {
        ChurnSequence seq;
        const Money root_flow = t_.pv(t_.net[t_.start][0][0], 0);
        decide(0, t_.start, 0, root_flow, seq, visit);
    }

private:
    void decide(int level, std::size_t s, int gamma, Money acc, ChurnSequence& seq,
                const std::function<void(const ChurnSequence&)>& visit) {
        const std::size_t target = p_.at({level, s, gamma});
        Money paid = 0.0;
        if (target != s) {
            paid = t_.cfg.capex_discounting == CapexDiscounting::None ? t_.capex[s][target]
                                                                      : t_.pv(t_.capex[s][target], level);
        }
        chance(level + 1, target, acc - paid, seq, visit);
    }

    void chance(int level, std::size_t s, Money acc, ChurnSequence& seq,
                const std::function<void(const ChurnSequence&)>& visit) {
        const bool terminal = t_.absorbing[s] || level >= t_.cfg.t_mig;
        for (int g = 0; g < 2; ++g) {
            const double pr = t_.cfg.churn.probability(g);
            if (pr <= 0.0) continue;
            seq.bits.push_back(g);
            seq.technologies.push_back(t_.cfg.graph.nodes[s].id);
            const double saved = seq.probability;
            seq.probability *= pr;
            Money value = acc + t_.pv(t_.net[s][level][g], level);
            if (terminal) {
                for (int k = level + 1; k <= t_.cfg.t_nw; ++k) value += t_.pv(t_.net[s][k][0], k);
                seq.npv = value;
                visit(seq);
            } else {
                decide(level, s, g, value, seq, visit);
            }
            seq.probability = saved;
            seq.bits.pop_back();
            seq.technologies.pop_back();
        }
    }

    const OracleTables& t_;
    const OraclePolicy& p_;
};

/// Enumerates policies year by year: at each level every reachable decision
/// state gets an action (stay first, then targets in id order), which fixes
/// the states reachable at the next level.
class PolicyEnumerator {
public:
    PolicyEnumerator(const OracleTables& t, std::uint64_t cap, std::function<void(const OraclePolicy&)> visit)
        : t_(t), cap_(cap), visit_(std::move(visit)) {}

    /// Returns false if the policy count exceeded the cap.
    bool run() {
        OraclePolicy policy;
        std::vector<OracleDecision> frontier{{0, t_.start, 0}};
        level(frontier, policy);
        return !overflow_;
    }

    std::uint64_t count() const { return count_; }

private:
    void level(const std::vector<OracleDecision>& frontier, OraclePolicy& policy) {
        if (overflow_) return;
        if (frontier.empty()) {
            if (++count_ > cap_) {
                overflow_ = true;
                return;
            }
            if (visit_) visit_(policy);
            return;
        }
        assign(frontier, 0, policy);
    }

    void assign(const std::vector<OracleDecision>& frontier, std::size_t i, OraclePolicy& policy) {
        if (overflow_) return;
        if (i == frontier.size()) {
            level(next_frontier(frontier, policy), policy);
            return;
        }
        const auto& d = frontier[i];
        for (std::size_t target : t_.actions[d.tech]) {
            policy[d] = target;
            assign(frontier, i + 1, policy);
            if (overflow_) break;
        }
        policy.erase(d);
    }

    std::vector<OracleDecision> next_frontier(const std::vector<OracleDecision>& frontier,
                                              const OraclePolicy& policy) const {
        std::vector<OracleDecision> next;
        if (frontier.empty()) return next;
        const int lvl = frontier.front().level + 1;
        if (lvl >= t_.cfg.t_mig) return next;
        std::vector<char> seen(t_.n, 0);
        for (const auto& d : frontier) {
            const std::size_t target = policy.at(d);
            if (t_.absorbing[target]) continue;
            seen[target] = 1;
        }
        for (std::size_t s = 0; s < t_.n; ++s) {
            if (!seen[s]) continue;
            for (int g = 0; g < 2; ++g) {
                if (t_.cfg.churn.probability(g) > 0.0) next.push_back({lvl, s, g});
            }
        }
        std::sort(next.begin(), next.end(), [&](const OracleDecision& a, const OracleDecision& b) {
            const auto& ia = t_.cfg.graph.nodes[a.tech].id;
            const auto& ib = t_.cfg.graph.nodes[b.tech].id;
            return ia != ib ? ia < ib : a.gamma < b.gamma;
        });
        return next;
    }

    const OracleTables& t_;
    std::uint64_t cap_;
    std::function<void(const OraclePolicy&)> visit_;
    std::uint64_t count_ = 0;
    bool overflow_ = false;
};

inline Policy to_policy(const OracleTables& t, const OraclePolicy& p) {
    Policy out;
    for (const auto& [d, target] : p) {
        Action a;
        if (target != d.tech) a.migrate_to = t.cfg.graph.nodes[target].id;
        out[{t.cfg.t_start + d.level, t.cfg.graph.nodes[d.tech].id, d.gamma}] = a;
    }
    return out;
}

inline std::vector<MigrationStep> reporting_path(const OracleTables& t, const OraclePolicy& p) {
    std::vector<MigrationStep> path;
    std::size_t s = t.start;
    for (int level = 0;; ++level) {
        auto it = p.find({level, s, 0});
        if (it == p.end()) break;
        const std::size_t target = it->second;
        if (target != s) path.push_back({t.cfg.t_start + level + 1, t.cfg.graph.nodes[target].id});
        s = target;
    }
    return path;
}

inline void check_limits(const ScenarioConfig& cfg, const OracleLimits& limits) {
    if (cfg.t_mig > limits.max_decision_years || cfg.graph.nodes.size() > limits.max_technologies) {
        throw PlanError(ErrorCode::instance_too_large,
                        "oracle handles at most " + std::to_string(limits.max_decision_years) +
                            " decision years and " + std::to_string(limits.max_technologies) + " technologies");
    }
}

}  // namespace detail

/// Every churn sequence the policy produces, with its probability and NPV.
inline std::vector<ChurnSequence> churn_sequences(const ScenarioConfig& cfg, const Policy& policy) {
    detail::OracleTables t(cfg);
    detail::OraclePolicy p;
    for (const auto& [state, action] : policy) {
        const auto s = cfg.graph.index_of(state.technology);
        const auto target = action.migrate_to ? cfg.graph.index_of(*action.migrate_to) : s;
        if (!s || !target) throw PlanError(ErrorCode::invalid_argument, "policy names an unknown technology");
        p[{state.year - cfg.t_start, *s, state.gamma}] = *target;
    }
    std::vector<ChurnSequence> out;
    detail::PolicyWalker walker(t, p);
    try {
        walker.walk([&](const ChurnSequence& seq) { out.push_back(seq); });
    } catch (const std::out_of_range&) {
        throw PlanError(ErrorCode::invalid_argument, "policy has no action for a reachable decision state");
    }
    return out;
}

/// Number of contingency policies the oracle would enumerate (saturating at cap + 1).
inline std::uint64_t oracle_policy_count(const ScenarioConfig& cfg, std::uint64_t cap) {
    detail::OracleTables t(cfg);
    detail::PolicyEnumerator counter(t, cap, nullptr);
    counter.run();
    return counter.count();
}

/// Exact optimum over all contingency policies. Raises INSTANCE_TOO_LARGE
/// above the configured limits.
inline OracleResult oracle_best(const ScenarioConfig& cfg, const OracleLimits& limits = {}) {
    detail::check_limits(cfg, limits);
    detail::OracleTables t(cfg);
    (void)goal_set(cfg);

    {
        detail::PolicyEnumerator counter(t, limits.max_policies, nullptr);
        if (!counter.run()) {
            throw PlanError(ErrorCode::instance_too_large,
                            "more than " + std::to_string(limits.max_policies) + " contingency policies");
        }
    }

    OracleResult best;
    best.expected_npv = -std::numeric_limits<Money>::infinity();
    detail::OraclePolicy best_policy;
    bool have = false;
    detail::PolicyEnumerator enumerator(t, limits.max_policies, [&](const detail::OraclePolicy& p) {
        Money expected = 0;
        detail::PolicyWalker walker(t, p);
        walker.walk([&](const ChurnSequence& seq) { expected += seq.probability * seq.npv; });
        if (!have || expected > best.expected_npv) {
            best.expected_npv = expected;
            best_policy = p;
            have = true;
        }
    });
    enumerator.run();
    best.policies_enumerated = enumerator.count();
    best.policy = detail::to_policy(t, best_policy);
    best.path = detail::reporting_path(t, best_policy);
    return best;
}

}  // namespace migplan
