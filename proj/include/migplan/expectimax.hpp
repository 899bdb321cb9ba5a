#pragma once

// Expectimax search over migration decisions.
//
// Tree layout: a Maximizer at (year t, tech s, gamma) has one Chance child per
// candidate technology at t+1 (stay first, then migrations sorted by id). A
// Chance node has two children, gamma = 0 then gamma = 1. They are Terminal
// when the technology is in the goal set or t+1 closes the migration window,
// Maximizers otherwise.
//
// Values:
//   Terminal  U = terminal_value(s, t, gamma)
//   Chance    H = Pr(0) U(child_0) + Pr(1) U(child_1)
//   Maximizer U = PV(R_t(gamma) - OPEX_t) + max_k [ H_k - PV_t(M_{s,s_k}) ]
//
// Ties at a Maximizer keep the earliest child, i.e. prefer staying, then the
// lexicographically smallest target id.

#include <array>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "migplan/economics.hpp"
#include "migplan/model.hpp"

namespace migplan {

enum class NodeKind { Maximizer, Chance, Terminal };

struct Node {
    NodeKind kind = NodeKind::Terminal;
    std::size_t tech = 0;  // index into ScenarioConfig::graph.nodes
    Year year = 0;
    int gamma = 0;
    std::vector<Node> children;
    Money value = std::numeric_limits<Money>::quiet_NaN();
    std::optional<std::size_t> chosen_child;  // Maximizer only
};

struct DecisionState {
    Year year = 0;
    std::string technology;
    int gamma = 0;

    friend auto operator<=>(const DecisionState&, const DecisionState&) = default;
};

/// Empty target means "stay".
struct Action {
    std::optional<std::string> migrate_to;

    bool is_stay() const { return !migrate_to.has_value(); }
    friend bool operator==(const Action&, const Action&) = default;
};

using Policy = std::map<DecisionState, Action>;

struct MigrationStep {
    Year year = 0;
    std::string technology;

    friend bool operator==(const MigrationStep&, const MigrationStep&) = default;
};

struct PlanResult {
    Money expected_npv = 0;
    std::vector<MigrationStep> path;
    Policy policy;
    GoalPolicy goal_used = GoalPolicy::FlexibleFTTx;
    CurveLabel curve = CurveLabel::Custom;
};

inline constexpr std::size_t kDefaultMaxTreeNodes = 10'000'000;

// ---------------------------------------------------------------------------
// Candidate generation
// ---------------------------------------------------------------------------

/// Out-neighbours of `tech` that the goal policy lets us enter, sorted by id.
/// A goal-set technology absorbs: it has no further migrations.
inline std::vector<const Technology*> possible_migrations(const Technology& tech, const ScenarioConfig& cfg) {
    std::vector<const Technology*> out;
    if (in_goal_set(tech, cfg.goal, cfg.goal_rate)) return out;
    for (const auto& id : cfg.graph.successors(tech.id)) {
        const auto* next = cfg.graph.find(id);
        if (next && next->id != tech.id && enterable(*next, cfg)) out.push_back(next);
    }
    return out;
}

/// Per-scenario lookup tables shared by both evaluators: candidate lists and
/// the economics values every node needs. Built once, read-only afterwards.
class SearchSpace {
public:
    explicit SearchSpace(const ScenarioConfig& cfg) : cfg_(&cfg) {
        if (auto v = validate_scenario(cfg); !v.empty()) {
            throw PlanError(ErrorCode::validation_failed, v.front().code + ": " + v.front().message, v);
        }
        const auto& nodes = cfg.graph.nodes;
        n_ = nodes.size();
        start_ = *cfg.graph.index_of(cfg.start_technology);
        years_ = cfg.t_mig + 1;

        absorbing_.resize(n_);
        candidates_.resize(n_);
        for (std::size_t s = 0; s < n_; ++s) {
            absorbing_[s] = in_goal_set(nodes[s], cfg.goal, cfg.goal_rate);
            candidates_[s].push_back(s);
            for (const auto* t : possible_migrations(nodes[s], cfg)) {
                candidates_[s].push_back(*cfg.graph.index_of(t->id));
            }
        }
        check_goal_reachable_in_window();

        flow_.assign(n_ * years_ * 2, 0.0);
        terminal_.assign(n_ * years_ * 2, 0.0);
        capex_pv_.assign(n_ * n_ * years_, 0.0);
        for (std::size_t s = 0; s < n_; ++s) {
            for (int k = 0; k < years_; ++k) {
                const Year y = cfg.t_start + k;
                for (int g = 0; g < 2; ++g) {
                    flow_[flow_index(s, k, g)] = discounted_net_flow(cfg, nodes[s], y, g);
                    terminal_[flow_index(s, k, g)] = terminal_value(nodes[s], y, cfg, g);
                }
            }
            for (std::size_t c : candidates_[s]) {
                if (c == s) continue;
                const Money m = migration_capex(nodes[s], nodes[c], cfg).total;
                for (int k = 0; k < years_; ++k) {
                    capex_pv_[(s * n_ + c) * years_ + k] = migration_capex_pv(m, cfg.t_start + k, cfg);
                }
            }
        }
    }

    const ScenarioConfig& config() const { return *cfg_; }
    std::size_t size() const { return n_; }
    std::size_t start() const { return start_; }
    bool absorbing(std::size_t s) const { return absorbing_[s]; }
    /// Stay first, then migration targets in id order.
    const std::vector<std::size_t>& candidates(std::size_t s) const { return candidates_[s]; }
    const std::string& id(std::size_t s) const { return cfg_->graph.nodes[s].id; }

    /// A Chance node at `year` on `s` resolves to Terminal children.
    bool chance_is_terminal(std::size_t s, Year year) const {
        return absorbing_[s] || year >= cfg_->window_end();
    }

    Money flow(std::size_t s, Year y, int gamma) const { return flow_[flow_index(s, y - cfg_->t_start, gamma)]; }
    Money terminal(std::size_t s, Year y, int gamma) const {
        return terminal_[flow_index(s, y - cfg_->t_start, gamma)];
    }
    /// Migration CAPEX from s to c paid in `y`, valued at the start year.
    Money capex_pv(std::size_t s, std::size_t c, Year y) const {
        if (s == c) return 0.0;
        return capex_pv_[(s * n_ + c) * years_ + (y - cfg_->t_start)];
    }
    double probability(int gamma) const { return cfg_->churn.probability(gamma); }

    /// Exact node count of the full tree (saturates at `cap` + 1).
    std::size_t tree_node_count(std::size_t cap) const {
        const std::size_t over = cap + 1;
        std::vector<std::vector<double>> memo(years_, std::vector<double>(n_, -1.0));
        // maximizer subtree size at (year offset k, tech s)
        auto max_count = [&](auto&& self, int k, std::size_t s) -> double {
            if (memo[k][s] >= 0) return memo[k][s];
            double total = 1;
            for (std::size_t c : candidates_[s]) {
                const Year child_year = cfg_->t_start + k + 1;
                double chance = 1;
                if (chance_is_terminal(c, child_year)) {
                    chance += 2;
                } else {
                    chance += 2 * self(self, k + 1, c);
                }
                total += chance;
                if (total > static_cast<double>(over)) break;
            }
            memo[k][s] = std::min(total, static_cast<double>(over));
            return memo[k][s];
        };
        const double n = max_count(max_count, 0, start_);
        return n >= static_cast<double>(over) ? over : static_cast<std::size_t>(n);
    }

private:
    std::size_t flow_index(std::size_t s, int k, int g) const { return (s * years_ + k) * 2 + g; }

    void check_goal_reachable_in_window() const {
        std::vector<char> frontier(n_, 0);
        frontier[start_] = 1;
        for (int step = 0; step <= cfg_->t_mig; ++step) {
            std::vector<char> next(n_, 0);
            for (std::size_t s = 0; s < n_; ++s) {
                if (!frontier[s]) continue;
                if (absorbing_[s]) return;
                if (step == cfg_->t_mig) continue;
                for (std::size_t c : candidates_[s]) next[c] = 1;
            }
            frontier.swap(next);
        }
        throw PlanError(ErrorCode::goal_unreachable,
                        "goal set cannot be reached within the " + std::to_string(cfg_->t_mig) +
                            "-year migration window");
    }

    const ScenarioConfig* cfg_;
    std::size_t n_ = 0;
    std::size_t start_ = 0;
    int years_ = 0;
    std::vector<bool> absorbing_;
    std::vector<std::vector<std::size_t>> candidates_;
    std::vector<Money> flow_;
    std::vector<Money> terminal_;
    std::vector<Money> capex_pv_;
};

// ---------------------------------------------------------------------------
// Tree construction
// ---------------------------------------------------------------------------

namespace detail {

inline Node make_maximizer(const SearchSpace& space, std::size_t s, Year year, int gamma);

inline Node make_chance(const SearchSpace& space, std::size_t s, Year year) {
    Node chance{NodeKind::Chance, s, year, 0, {}, std::numeric_limits<Money>::quiet_NaN(), std::nullopt};
    chance.children.reserve(2);
    for (int g = 0; g < 2; ++g) {
        if (space.chance_is_terminal(s, year)) {
            chance.children.push_back(
                Node{NodeKind::Terminal, s, year, g, {}, std::numeric_limits<Money>::quiet_NaN(), std::nullopt});
        } else {
            chance.children.push_back(make_maximizer(space, s, year, g));
        }
    }
    return chance;
}

inline Node make_maximizer(const SearchSpace& space, std::size_t s, Year year, int gamma) {
    Node node{NodeKind::Maximizer, s, year, gamma, {}, std::numeric_limits<Money>::quiet_NaN(), std::nullopt};
    const auto& cands = space.candidates(s);
    node.children.reserve(cands.size());
    for (std::size_t c : cands) node.children.push_back(make_chance(space, c, year + 1));
    return node;
}

}  // namespace detail

/// Builds the full Expectimax tree rooted at (T_start, start technology).
/// Refuses trees with more than `max_nodes` nodes; use evaluate_memoized then.
inline Node build_tree(const ScenarioConfig& cfg, std::size_t max_nodes = kDefaultMaxTreeNodes) {
    SearchSpace space(cfg);
    const auto count = space.tree_node_count(max_nodes);
    if (count > max_nodes) {
        throw PlanError(ErrorCode::tree_too_large, "search tree exceeds " + std::to_string(max_nodes) +
                                                       " nodes; use the memoized evaluator");
    }
    return detail::make_maximizer(space, space.start(), cfg.t_start, 0);
}

inline std::size_t count_nodes(const Node& n) {
    std::size_t total = 1;
    for (const auto& c : n.children) total += count_nodes(c);
    return total;
}

// ---------------------------------------------------------------------------
// Tree evaluation
// ---------------------------------------------------------------------------

struct EvalOptions {
    bool parallel = false;  // evaluate the root's subtrees concurrently
};

namespace detail {

[[noreturn]] inline void malformed(const std::string& why) {
    throw PlanError(ErrorCode::unevaluated, "malformed search tree: " + why);
}

inline void evaluate_node(Node& node, const SearchSpace& space);

inline Money best_child(Node& node, const SearchSpace& space) {
    Money best = -std::numeric_limits<Money>::infinity();
    std::optional<std::size_t> chosen;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const Node& child = node.children[i];
        if (child.kind != NodeKind::Chance) malformed("maximizer child is not a chance node");
        if (child.year != node.year + 1) malformed("chance node year does not follow its parent");
        const Money candidate = child.value - space.capex_pv(node.tech, child.tech, node.year);
        if (!chosen || candidate > best) {
            best = candidate;
            chosen = i;
        }
    }
    node.chosen_child = chosen;
    return best;
}

inline void evaluate_maximizer_children(Node& node, const SearchSpace& space, bool parallel) {
    if (!parallel || node.children.size() < 2) {
        for (auto& c : node.children) evaluate_node(c, space);
        return;
    }
    std::vector<std::future<void>> jobs;
    jobs.reserve(node.children.size());
    for (auto& c : node.children) {
        jobs.push_back(std::async(std::launch::async, [&c, &space] { evaluate_node(c, space); }));
    }
    for (auto& j : jobs) j.get();
}

inline void finish_node(Node& node, const SearchSpace& space) {
    switch (node.kind) {
        case NodeKind::Terminal:
            if (!node.children.empty()) malformed("terminal node has children");
            node.value = space.terminal(node.tech, node.year, node.gamma);
            break;
        case NodeKind::Chance: {
            if (node.children.size() != 2 || node.children[0].gamma != 0 || node.children[1].gamma != 1) {
                malformed("chance node needs exactly a gamma=0 and a gamma=1 child");
            }
            node.value = space.probability(0) * node.children[0].value + space.probability(1) * node.children[1].value;
            break;
        }
        case NodeKind::Maximizer: {
            if (node.children.empty()) malformed("maximizer without children");
            const Money best = best_child(node, space);
            node.value = space.flow(node.tech, node.year, node.gamma) + best;
            break;
        }
    }
}

inline void evaluate_node(Node& node, const SearchSpace& space) {
    if (node.tech >= space.size()) malformed("unknown technology index");
    if (node.year < space.config().t_start || node.year > space.config().window_end()) {
        malformed("node year outside the migration window");
    }
    for (auto& c : node.children) evaluate_node(c, space);
    finish_node(node, space);
}

inline void collect_policy(const Node& node, const SearchSpace& space, Policy& policy) {
    if (node.kind == NodeKind::Maximizer) {
        const Node& chosen = node.children[*node.chosen_child];
        Action a;
        if (chosen.tech != node.tech) a.migrate_to = space.id(chosen.tech);
        policy[{node.year, space.id(node.tech), node.gamma}] = a;
    }
    for (const auto& c : node.children) collect_policy(c, space, policy);
}

}  // namespace detail

/// Bottom-up pass over a tree from build_tree. Fills every node's value and
/// every Maximizer's chosen_child.
inline PlanResult evaluate(Node& root, const ScenarioConfig& cfg, EvalOptions options = {}) {
    SearchSpace space(cfg);
    if (root.kind != NodeKind::Maximizer) detail::malformed("root must be a maximizer");
    if (root.year != cfg.t_start || root.tech != space.start()) detail::malformed("root is not the start state");

    for (auto& c : root.children) {
        if (c.year != root.year + 1) detail::malformed("chance node year does not follow its parent");
    }
    detail::evaluate_maximizer_children(root, space, options.parallel);
    detail::finish_node(root, space);

    PlanResult result;
    result.expected_npv = root.value;
    result.goal_used = cfg.goal;
    result.curve = cfg.curve.label;
    detail::collect_policy(root, space, result.policy);

    // Reporting branch: no churn at every chance node.
    const Node* cur = &root;
    while (cur && cur->kind == NodeKind::Maximizer) {
        const Node& chance = cur->children[*cur->chosen_child];
        if (chance.tech != cur->tech) result.path.push_back({chance.year, space.id(chance.tech)});
        cur = &chance.children[0];
    }
    return result;
}

// ---------------------------------------------------------------------------
// Memoized evaluation
// ---------------------------------------------------------------------------

/// Same value function as evaluate(build_tree(cfg)) computed over states
/// (year, tech, gamma) instead of tree nodes. Chance values depend on
/// (year, tech) only, so each is computed once.
inline PlanResult evaluate_memoized(const ScenarioConfig& cfg) {
    SearchSpace space(cfg);
    const std::size_t n = space.size();
    const int levels = cfg.t_mig + 1;  // year offsets 0..t_mig
    // chance[k][s] and maximizer[k][s][g], choice[k][s]
    std::vector<std::vector<Money>> chance(levels, std::vector<Money>(n, 0.0));
    std::vector<std::vector<std::array<Money, 2>>> maxv(levels, std::vector<std::array<Money, 2>>(n));
    std::vector<std::vector<std::size_t>> choice(levels, std::vector<std::size_t>(n, 0));

    const double p0 = space.probability(0);
    const double p1 = space.probability(1);

    for (int k = levels - 1; k >= 0; --k) {
        const Year y = cfg.t_start + k;
        if (k >= 1) {
            for (std::size_t s = 0; s < n; ++s) {
                if (space.chance_is_terminal(s, y)) {
                    chance[k][s] = p0 * space.terminal(s, y, 0) + p1 * space.terminal(s, y, 1);
                }
            }
        }
        if (k == levels - 1) continue;  // no decisions at the window's closing year
        for (std::size_t s = 0; s < n; ++s) {
            const auto& cands = space.candidates(s);
            Money best = -std::numeric_limits<Money>::infinity();
            std::size_t chosen = 0;
            bool first = true;
            for (std::size_t c : cands) {
                const Money candidate = chance[k + 1][c] - space.capex_pv(s, c, y);
                if (first || candidate > best) {
                    best = candidate;
                    chosen = c;
                    first = false;
                }
            }
            choice[k][s] = chosen;
            for (int g = 0; g < 2; ++g) maxv[k][s][g] = space.flow(s, y, g) + best;
        }
        if (k >= 1) {
            for (std::size_t s = 0; s < n; ++s) {
                if (!space.chance_is_terminal(s, y)) chance[k][s] = p0 * maxv[k][s][0] + p1 * maxv[k][s][1];
            }
        }
    }

    PlanResult result;
    result.expected_npv = maxv[0][space.start()][0];
    result.goal_used = cfg.goal;
    result.curve = cfg.curve.label;

    // Policy over every structurally reachable decision state, as in the tree.
    std::set<std::size_t> frontier{space.start()};
    for (int k = 0; k < levels - 1; ++k) {
        const Year y = cfg.t_start + k;
        std::set<std::size_t> next;
        for (std::size_t s : frontier) {
            const std::size_t c = choice[k][s];
            Action a;
            if (c != s) a.migrate_to = space.id(c);
            for (int g = 0; g < 2; ++g) {
                if (k == 0 && g == 1) continue;  // root carries no churn draw
                result.policy[{y, space.id(s), g}] = a;
            }
            for (std::size_t cand : space.candidates(s)) {
                if (!space.chance_is_terminal(cand, y + 1)) next.insert(cand);
            }
        }
        frontier.swap(next);
    }

    std::size_t s = space.start();
    for (int k = 0; k < levels - 1; ++k) {
        const std::size_t c = choice[k][s];
        if (c != s) result.path.push_back({cfg.t_start + k + 1, space.id(c)});
        if (space.chance_is_terminal(c, cfg.t_start + k + 1)) break;
        s = c;
    }
    return result;
}

}  // namespace migplan
