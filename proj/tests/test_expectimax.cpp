#include <catch_amalgamated.hpp>

#include <functional>

#include "migplan/expectimax.hpp"
#include "support/fixtures.hpp"
#include "support/max_only.hpp"
#include "support/random_scenario.hpp"

using namespace migplan;
using namespace migplan::testing;

namespace {

void visit(const Node& n, const std::function<void(const Node&)>& f) {
    f(n);
    for (const auto& c : n.children) visit(c, f);
}

std::size_t index_of(const ScenarioConfig& cfg, const char* id) { return *cfg.graph.index_of(id); }

}  // namespace

TEST_CASE("toy tree shape") {
    const auto cfg = toy();
    const auto root = build_tree(cfg);
    const auto pon1 = index_of(cfg, "FTTCab_GPON_25");
    const auto pon2 = index_of(cfg, "FTTB_XGPON_100");
    REQUIRE(root.kind == NodeKind::Maximizer);
    REQUIRE(root.children.size() == 3);
    CHECK(root.children[0].tech == index_of(cfg, "ADSL"));
    CHECK(root.children[1].tech == pon2);
    CHECK(root.children[2].tech == pon1);

    // PON2 in the first decision year absorbs; PON1 spawns Churn and No-Churn maximizers.
    const auto& pon2_chance = root.children[1];
    CHECK(pon2_chance.year == 2019);
    for (const auto& c : pon2_chance.children) CHECK(c.kind == NodeKind::Terminal);
    const auto& pon1_chance = root.children[2];
    REQUIRE(pon1_chance.children.size() == 2);
    CHECK(pon1_chance.children[0].kind == NodeKind::Maximizer);
    CHECK(pon1_chance.children[0].gamma == 0);
    CHECK(pon1_chance.children[1].gamma == 1);

    visit(root, [&](const Node& n) {
        if (n.kind == NodeKind::Chance) CHECK(n.children.size() == 2);
        if (n.kind == NodeKind::Terminal) CHECK(n.children.empty());
        CHECK(n.year <= cfg.window_end());
    });
    CHECK(count_nodes(root) == SearchSpace(cfg).tree_node_count(kDefaultMaxTreeNodes));
}

TEST_CASE("toy plan") {
    const auto cfg = toy();
    auto root = build_tree(cfg);
    const auto r = evaluate(root, cfg);
    REQUIRE(r.path.size() == 2);
    CHECK(r.path[0] == MigrationStep{2019, "FTTCab_GPON_25"});
    CHECK(r.path[1] == MigrationStep{2020, "FTTB_XGPON_100"});
    CHECK(std::abs(r.expected_npv - 381.0) <= 1.0);

    const auto m = evaluate_memoized(cfg);
    CHECK(m.expected_npv == r.expected_npv);
    CHECK(m.path == r.path);
    CHECK(m.policy == r.policy);
}

TEST_CASE("node value relations hold after evaluation") {
    const auto cfg = toy();
    auto root = build_tree(cfg);
    evaluate(root, cfg);
    visit(root, [&](const Node& n) {
        if (n.kind == NodeKind::Chance) {
            const double lo = std::min(n.children[0].value, n.children[1].value);
            const double hi = std::max(n.children[0].value, n.children[1].value);
            CHECK(n.value >= lo - 1e-9);
            CHECK(n.value <= hi + 1e-9);
        }
        if (n.kind == NodeKind::Maximizer) {
            // Stay is child 0 and costs nothing.
            const SearchSpace space(cfg);
            CHECK(n.value >= space.flow(n.tech, n.year, n.gamma) + n.children[0].value);
        }
    });
}

TEST_CASE("window of one year makes every chance node terminal") {
    auto cfg = toy();
    cfg.t_mig = 1;
    const auto root = build_tree(cfg);
    for (const auto& chance : root.children) {
        for (const auto& c : chance.children) CHECK(c.kind == NodeKind::Terminal);
    }
}

TEST_CASE("single goal node next to start gives a depth-one tree") {
    auto cfg = toy();
    cfg.graph.nodes.erase(cfg.graph.nodes.begin() + 1);
    cfg.graph.edges = {{"ADSL", "FTTB_XGPON_100"}};
    cfg.costs.records.erase("FTTCab_GPON_25");
    cfg.t_mig = 1;
    const auto root = build_tree(cfg);
    CHECK(root.children.size() == 2);
    CHECK(count_nodes(root) == 7);
}

TEST_CASE("possible migrations") {
    const auto cfg = load_scenario(data_path("scenarios/munich_residential.json"));
    const auto* udwdm50 = cfg.graph.find("FTTB_UDWDM_50");
    REQUIRE(udwdm50);
    for (const auto* t : possible_migrations(*udwdm50, cfg)) CHECK(t->id != "FTTB_XGPON_100");
    CHECK(possible_migrations(*cfg.graph.find("FTTB_UDWDM_100"), cfg).empty());
    const auto first = possible_migrations(*cfg.graph.find("ADSL"), cfg);
    CHECK(first.size() == cfg.graph.successors("ADSL").size());
    CHECK(std::is_sorted(first.begin(), first.end(), [](auto* a, auto* b) { return a->id < b->id; }));
}

TEST_CASE("chance value is the churn-weighted mean") {
    ScenarioConfig cfg = toy();
    SearchSpace space(cfg);
    CHECK(space.probability(0) * 100 + space.probability(1) * 50 == Catch::Approx(95.0).epsilon(1e-15));
}

TEST_CASE("ties prefer staying, then the smallest id") {
    auto cfg = toy();
    // Everything is worth zero, so every action ties.
    for (auto& [id, rec] : cfg.costs.records) {
        rec.capex = {};
        rec.opex = OpexBreakdown{};
    }
    cfg.costs.adsl_opex_per_subscriber = 0;
    for (int rate : {20, 25, 100}) cfg.tariffs.set(SubscriberClass::Residential, rate, 0.0);
    const auto r = evaluate_memoized(cfg);
    CHECK(r.path.empty());
    CHECK(r.policy.at({2018, "ADSL", 0}).is_stay());
}

TEST_CASE("tree and memoized search agree on random scenarios") {
    RandomScenarios gen(7);
    for (int i = 0; i < 150; ++i) {
        const auto cfg = gen.next();
        auto root = build_tree(cfg);
        const auto a = evaluate(root, cfg);
        const auto b = evaluate_memoized(cfg);
        INFO("scenario " << i);
        CHECK(close(a.expected_npv, b.expected_npv, 1e-12));
        CHECK(a.path == b.path);
        CHECK(a.policy == b.policy);
    }
}

TEST_CASE("parallel evaluation matches serial") {
    const auto cfg = load_scenario(data_path("scenarios/munich_residential.json"));
    auto small = cfg;
    small.t_mig = 3;
    auto a = build_tree(small);
    auto b = build_tree(small);
    const auto ra = evaluate(a, small);
    const auto rb = evaluate(b, small, {true});
    CHECK(ra.expected_npv == rb.expected_npv);
    CHECK(ra.path == rb.path);
}

TEST_CASE("no churn collapses to deterministic search") {
    RandomScenarios gen(11);
    for (int i = 0; i < 100; ++i) {
        auto cfg = gen.next();
        cfg.churn.churn_probability = 0;
        const auto r = evaluate_memoized(cfg);
        const auto d = max_only(cfg);
        INFO("scenario " << i);
        CHECK(close(r.expected_npv, d.value, 1e-12));
        CHECK(r.path == d.path);
    }
}

TEST_CASE("oversized trees are refused") {
    const auto cfg = load_scenario(data_path("scenarios/munich_converged.json"));
    CHECK_THROWS_MATCHES(build_tree(cfg, 1000), PlanError,
                         Catch::Matchers::Predicate<PlanError>(
                             [](const PlanError& e) { return e.code() == ErrorCode::tree_too_large; }));
}

TEST_CASE("malformed trees are reported") {
    const auto cfg = toy();
    auto root = build_tree(cfg);
    root.children[1].children.pop_back();
    CHECK_THROWS_MATCHES(evaluate(root, cfg), PlanError,
                         Catch::Matchers::Predicate<PlanError>(
                             [](const PlanError& e) { return e.code() == ErrorCode::unevaluated; }));
}

TEST_CASE("goal out of reach within the window") {
    auto cfg = toy();
    cfg.graph.edges = {{"ADSL", "FTTCab_GPON_25"}, {"FTTCab_GPON_25", "FTTB_XGPON_100"}};
    cfg.t_mig = 1;
    CHECK_THROWS_MATCHES(evaluate_memoized(cfg), PlanError,
                         Catch::Matchers::Predicate<PlanError>(
                             [](const PlanError& e) { return e.code() == ErrorCode::goal_unreachable; }));
}

TEST_CASE("single technology graph stays put") {
    auto cfg = toy();
    cfg.graph.nodes.resize(1);
    cfg.graph.edges.clear();
    cfg.costs.records.clear();
    cfg.goal = GoalPolicy::FlexibleFTTx;
    cfg.goal_rate = 20;
    const auto r = evaluate_memoized(cfg);
    CHECK(r.path.empty());
    const auto& adsl = cfg.graph.nodes[0];
    const double expected = discounted_net_flow(cfg, adsl, 2018, 0) +
                            0.9 * terminal_value(adsl, 2019, cfg, 0) + 0.1 * terminal_value(adsl, 2019, cfg, 1);
    CHECK(close(r.expected_npv, expected, 1e-12));
    cfg.churn.churn_probability = 0;
    CHECK(close(evaluate_memoized(cfg).expected_npv, terminal_value(adsl, 2018, cfg), 1e-12));
}
