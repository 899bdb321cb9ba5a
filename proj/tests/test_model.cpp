#include <catch_amalgamated.hpp>

#include "migplan/model.hpp"
#include "support/fixtures.hpp"

using namespace migplan;
using namespace migplan::testing;

TEST_CASE("enum names round trip") {
    CHECK(parse_architecture("FTTCab") == Architecture::FTTCab);
    CHECK(parse_family("UDWDM") == Family::UDWDM);
    CHECK(parse_goal_policy("FixedFTTH") == GoalPolicy::FixedFTTH);
    CHECK(parse_goal_policy("flexible") == GoalPolicy::FlexibleFTTx);
    CHECK(parse_opex_mode("percentage") == OpexMode::Percentage);
    CHECK(parse_capex_discounting("none") == CapexDiscounting::None);
    CHECK_FALSE(parse_family("DOCSIS").has_value());
    CHECK(to_string(SubscriberClass::ITS) == "ITS");
}

TEST_CASE("canonical technology ids") {
    CHECK(tech(Architecture::FTTB, Family::HPON, 50).id == "FTTB_HPON_50");
    CHECK(tech(Architecture::ADSL, Family::Copper, 20).id == "ADSL");
}

TEST_CASE("successors are sorted and unique") {
    MigrationGraph g;
    g.edges = {{"A", "C"}, {"A", "B"}, {"B", "C"}, {"A", "B"}};
    CHECK(g.successors("A") == std::vector<std::string>{"B", "C"});
    CHECK(g.successors("C").empty());
}

TEST_CASE("churn probabilities") {
    ChurnModel c;
    CHECK(c.probability(0) == 0.9);
    CHECK(c.probability(1) == 0.1);
}

TEST_CASE("family rule") {
    const auto udwdm50 = tech(Architecture::FTTB, Family::UDWDM, 50);
    const auto xgpon100 = tech(Architecture::FTTB, Family::XGPON, 100);
    const auto udwdm100 = tech(Architecture::FTTB, Family::UDWDM, 100);
    const auto hpon100 = tech(Architecture::FTTB, Family::HPON, 100);
    CHECK(violates_family_rule(udwdm50, xgpon100));
    CHECK(violates_family_rule(udwdm100, xgpon100));
    CHECK_FALSE(violates_family_rule(udwdm50, udwdm100));
    CHECK_FALSE(violates_family_rule(udwdm50, hpon100));
    CHECK_FALSE(violates_family_rule(tech(Architecture::ADSL, Family::Copper, 20), xgpon100));
}

TEST_CASE("goal sets") {
    auto cfg = load_scenario(data_path("scenarios/munich_residential.json"));
    cfg.goal = GoalPolicy::FixedFTTH;
    const auto fixed = goal_set(cfg);
    CHECK(fixed == std::set<std::string>{"FTTH_HPON_100", "FTTH_UDWDM_100", "FTTH_XGPON_100"});
    cfg.goal = GoalPolicy::FlexibleFTTx;
    const auto flex = goal_set(cfg);
    CHECK(std::includes(flex.begin(), flex.end(), fixed.begin(), fixed.end()));
    CHECK(flex.count("FTTB_XGPON_100") == 1);
}

TEST_CASE("fixed goal excludes non-FTTH goal-rate nodes unless waypoints are allowed") {
    auto cfg = load_scenario(data_path("scenarios/munich_residential.json"));
    cfg.goal = GoalPolicy::FixedFTTH;
    const auto* fttb100 = cfg.graph.find("FTTB_HPON_100");
    const auto* fttb50 = cfg.graph.find("FTTB_HPON_50");
    REQUIRE(fttb100);
    REQUIRE(fttb50);
    CHECK_FALSE(enterable(*fttb100, cfg));
    CHECK(enterable(*fttb50, cfg));
    cfg.fixed_goal_waypoints = true;
    CHECK(enterable(*fttb100, cfg));
}

TEST_CASE("graph without a goal-rate node is unreachable") {
    auto cfg = toy();
    cfg.graph.nodes.pop_back();
    cfg.graph.edges = {{"ADSL", "FTTCab_GPON_25"}};
    CHECK_THROWS_MATCHES(goal_set(cfg), PlanError,
                         Catch::Matchers::Predicate<PlanError>(
                             [](const PlanError& e) { return e.code() == ErrorCode::goal_unreachable; }));
    CHECK(has_code(validate_scenario(cfg), "GOAL_UNREACHABLE"));
}

TEST_CASE("bundled scenarios validate") {
    for (const char* name : {"toy", "munich_residential", "munich_converged"}) {
        INFO(name);
        const auto cfg = load_scenario(data_path(std::string("scenarios/") + name + ".json"));
        CHECK(validate_scenario(cfg).empty());
    }
}

TEST_CASE("validation reports each broken invariant") {
    SECTION("empty window") {
        auto cfg = toy();
        cfg.t_mig = 0;
        CHECK(has_code(validate_scenario(cfg), "HORIZON_EMPTY"));
    }
    SECTION("family rule edge") {
        auto cfg = load_scenario(data_path("scenarios/munich_residential.json"));
        cfg.graph.edges.push_back({"FTTB_UDWDM_100", "FTTB_XGPON_100"});
        CHECK(has_code(validate_scenario(cfg), "RATE_DOWNGRADE_OR_FAMILY_RULE"));
    }
    SECTION("rate downgrade") {
        auto cfg = toy();
        cfg.graph.edges.push_back({"FTTB_XGPON_100", "FTTCab_GPON_25"});
        CHECK(has_code(validate_scenario(cfg), "RATE_DOWNGRADE_OR_FAMILY_RULE"));
    }
    SECTION("unknown node") {
        auto cfg = toy();
        cfg.graph.edges.push_back({"ADSL", "FTTH_GPON_100"});
        CHECK(has_code(validate_scenario(cfg), "UNKNOWN_NODE"));
    }
    SECTION("self edge and duplicate edge") {
        auto cfg = toy();
        cfg.graph.edges.push_back({"ADSL", "ADSL"});
        cfg.graph.edges.push_back({"ADSL", "FTTCab_GPON_25"});
        const auto v = validate_scenario(cfg);
        CHECK(has_code(v, "SELF_EDGE"));
        CHECK(has_code(v, "DUPLICATE_EDGE"));
    }
    SECTION("tariffs") {
        auto cfg = toy();
        cfg.tariffs.set(SubscriberClass::Residential, 25, -1);
        cfg.tariffs.arpu.erase({SubscriberClass::Residential, 100});
        const auto v = validate_scenario(cfg);
        CHECK(has_code(v, "TARIFF_NEGATIVE"));
        CHECK(has_code(v, "TARIFF_MISSING"));
    }
    SECTION("curve") {
        auto cfg = toy();
        cfg.curve.values[2020] = 0.01;
        cfg.curve.values.erase(2023);
        const auto v = validate_scenario(cfg);
        CHECK(has_code(v, "CURVE_NOT_MONOTONE"));
        CHECK(has_code(v, "CURVE_MISSING_YEAR"));
    }
    SECTION("churn and costs") {
        auto cfg = toy();
        cfg.churn.churn_probability = 1.5;
        cfg.costs.records["FTTCab_GPON_25"].capex.fiber = -1;
        cfg.costs.records.erase("FTTB_XGPON_100");
        const auto v = validate_scenario(cfg);
        CHECK(has_code(v, "CHURN_RANGE"));
        CHECK(has_code(v, "COST_NEGATIVE"));
        CHECK(has_code(v, "COST_MISSING"));
    }
    SECTION("technology shape") {
        auto cfg = toy();
        cfg.graph.nodes[1].id = "PON1";
        cfg.graph.nodes[2].data_rate = 40;
        const auto v = validate_scenario(cfg);
        CHECK(has_code(v, "TECH_ID_FORMAT"));
        CHECK(has_code(v, "INVALID_RATE"));
    }
    SECTION("demand label") {
        auto cfg = toy();
        cfg.demands.counts[SubscriberClass::Business] = 3;
        CHECK(has_code(validate_scenario(cfg), "DEMAND_LABEL"));
    }
}

TEST_CASE("validation is deterministic") {
    auto cfg = toy();
    cfg.t_mig = 0;
    cfg.churn.churn_rate = 2;
    CHECK(validate_scenario(cfg) == validate_scenario(cfg));
}
