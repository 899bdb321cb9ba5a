#include <catch_amalgamated.hpp>

#include <sstream>

#include "migplan/cli.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace migplan;
using namespace migplan::testing;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

template <typename F>
Run run(F f) {
    std::ostringstream out, err;
    const int code = f(out, err);
    return {code, out.str(), err.str()};
}

const std::string kToy = data_path("scenarios/toy.json");
const std::string kResidential = data_path("scenarios/munich_residential.json");
const std::string kConverged = data_path("scenarios/munich_converged.json");

}  // namespace

TEST_CASE("validate") {
    cli::CommonOptions common;
    auto r = run([&](auto& o, auto& e) { return cli::cmd_validate(kConverged, common, o, e); });
    CHECK(r.code == 0);
    CHECK(r.out == "munich_converged: OK\n");

    TempDir tmp;
    auto j = load_json_file(kToy);
    j["horizon"]["T_mig"] = 0;
    j["tariffs"]["Residential"]["25"] = "-1";
    const auto bad = tmp.write("bad.json", j.dump());
    r = run([&](auto& o, auto& e) { return cli::cmd_validate(bad, common, o, e); });
    CHECK(r.code == 1);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("HORIZON_EMPTY"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("TARIFF_NEGATIVE"));
}

TEST_CASE("plan toy") {
    cli::CommonOptions common;
    auto r = run([&](auto& o, auto& e) { return cli::cmd_plan(kToy, common, {}, o, e); });
    CHECK(r.code == 0);
    CHECK(r.out ==
          "Penetration Curve | Migration Path | Net Present Value [C.U.]\nCustom | 2019: PON1 / 2020: PON2 | 381.13\n");

    common.naive_tree = true;
    auto tree = run([&](auto& o, auto& e) { return cli::cmd_plan(kToy, common, {}, o, e); });
    CHECK(tree.out == r.out);

    common.output = OutputFormat::Json;
    auto js = run([&](auto& o, auto& e) { return cli::cmd_plan(kToy, common, {}, o, e); });
    const auto parsed = result_from_json(parse_json_text(js.out, "stdout"));
    CHECK(parsed.path.size() == 2);
}

TEST_CASE("plan options pick curve, goal and costs") {
    cli::CommonOptions common;
    cli::PlanOptions opts;
    opts.curve = "conservative";
    opts.goal = GoalPolicy::FixedFTTH;
    opts.costs = "bsg";
    auto r = run([&](auto& o, auto& e) { return cli::cmd_plan(kConverged, common, opts, o, e); });
    CHECK(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("\nConservative | "));
}

TEST_CASE("plan errors map to exit codes") {
    cli::CommonOptions common;
    auto r = run([&](auto& o, auto& e) { return cli::cmd_plan(data_path("scenarios/missing.json"), common, {}, o, e); });
    CHECK(r.code == 2);
    CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("IO_ERROR"));

    common.naive_tree = true;
    common.max_nodes = 100;
    r = run([&](auto& o, auto& e) { return cli::cmd_plan(kConverged, common, {}, o, e); });
    CHECK(r.code == 3);
    CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("TREE_TOO_LARGE"));
}

TEST_CASE("output file") {
    TempDir tmp;
    cli::CommonOptions common;
    common.output = OutputFormat::Csv;
    common.out_path = tmp.path() / "plan.csv";
    auto r = run([&](auto& o, auto& e) { return cli::cmd_plan(kToy, common, {}, o, e); });
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK_THAT(read_text_file(*common.out_path), Catch::Matchers::StartsWith("row,year,technology"));
}

TEST_CASE("compare reports the gap") {
    cli::CommonOptions common;
    auto r = run([&](auto& o, auto& e) { return cli::cmd_compare(kResidential, common, o, e); });
    CHECK(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("FlexibleFTTx | Realistic | 2019: "));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("FixedFTTH | Aggressive | 2019: "));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("Conservative gap: "));
}

TEST_CASE("compare on a scenario whose goal sets coincide has zero gap") {
    cli::CommonOptions common;
    common.output = OutputFormat::Json;
    TempDir tmp;
    auto j = load_json_file(kResidential);
    // Keep ADSL and the FTTH goal nodes only.
    json techs = json::array();
    for (const auto& t : j["technologies"]) {
        const auto id = t["id"].get<std::string>();
        if (id == "ADSL" || id.rfind("FTTH_", 0) == 0) techs.push_back(t);
    }
    j["technologies"] = techs;
    json edges = json::array();
    for (const auto& t : techs) {
        if (t["id"] != "ADSL") edges.push_back({{"from", "ADSL"}, {"to", t["id"]}});
    }
    j["edges"] = edges;
    j["curve_library"] = {{"conservative", data_path("curves/conservative.json")},
                          {"realistic", data_path("curves/realistic.json")},
                          {"aggressive", data_path("curves/aggressive.json")}};
    j["curve"] = {{"ref", "realistic"}};
    j["costs"] = load_json_file(data_path("costs/residential_oase.json"));
    j.erase("costs_ref");
    j.erase("cost_library");
    const auto p = tmp.write("ftth.json", j.dump());
    auto r = run([&](auto& o, auto& e) { return cli::cmd_compare(p, common, o, e); });
    INFO(r.err);
    REQUIRE(r.code == 0);
    const auto out = parse_json_text(r.out, "stdout");
    for (const auto& c : out["curves"]) CHECK(c["gap"] == "0");
}

TEST_CASE("sweep") {
    cli::CommonOptions common;
    cli::SweepSpec spec;
    spec.parameter = cli::SweepParameter::ChurnProbability;
    spec.values = {"0", "0.1", "0.5"};
    spec.base_scenario = kResidential;
    auto r = run([&](auto& o, auto& e) { return cli::cmd_sweep(spec, common, o, e); });
    CHECK(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::StartsWith("parameter,value,curve,goal,expected_npv,path\n"));
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("# monotonicity realistic: non-increasing in churn_probability"));

    spec.parameter = cli::SweepParameter::CostDataset;
    spec.values = {"oase", "bsg"};
    spec.base_scenario = kConverged;
    r = run([&](auto& o, auto& e) { return cli::cmd_sweep(spec, common, o, e); });
    CHECK(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("cost_dataset,bsg,Aggressive,"));

    spec.values = {"nope"};
    r = run([&](auto& o, auto& e) { return cli::cmd_sweep(spec, common, o, e); });
    CHECK(r.code == 2);
}

TEST_CASE("sweep spec files") {
    TempDir tmp;
    const auto p = tmp.write("spec.json", json{{"parameter", "discount_rate"},
                                                {"values", {0.05, "0.1"}},
                                                {"base_scenario", kToy}}
                                                  .dump());
    const auto spec = cli::load_sweep_spec(p);
    CHECK(spec.parameter == cli::SweepParameter::DiscountRate);
    CHECK(spec.values == std::vector<std::string>{"0.05", "0.1"});
    CHECK(spec.base_scenario == kToy);
}

TEST_CASE("verify") {
    cli::CommonOptions common;
    auto r = run([&](auto& o, auto& e) { return cli::cmd_verify(kToy, common, o, e); });
    CHECK(r.code == 0);
    CHECK_THAT(r.out, Catch::Matchers::EndsWith("AGREE\n"));

    r = run([&](auto& o, auto& e) { return cli::cmd_verify(kConverged, common, o, e); });
    CHECK(r.code == 3);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("oracle: skipped"));
    CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("INSTANCE_TOO_LARGE"));
}

TEST_CASE("verify catches a corrupted search") {
    cli::CommonOptions common;
    cli::VerifyHooks hooks;
    hooks.memoized = [](const ScenarioConfig& cfg) {
        auto r = evaluate_memoized(cfg);
        r.expected_npv += 1.0;
        return r;
    };
    auto r = run([&](auto& o, auto& e) { return cli::cmd_verify(kToy, common, o, e, hooks); });
    CHECK(r.code == 4);
    CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("DISAGREEMENT"));
}

TEST_CASE("agreement tolerance") {
    CHECK(cli::agree(1e6, 1e6 * (1 + 5e-10)));
    CHECK_FALSE(cli::agree(1e6, 1e6 * (1 + 5e-9)));
    CHECK(cli::agree(0.0, 1e-10));
}

TEST_CASE("sweep on a scenario without a curve library uses its own curve") {
    cli::SweepSpec spec;
    spec.parameter = cli::SweepParameter::DiscountRate;
    spec.values = {"0.05", "0.1"};
    spec.base_scenario = data_path("scenarios/toy.json");
    cli::CommonOptions common;
    std::ostringstream out, err;
    REQUIRE(cli::cmd_sweep(spec, common, out, err) == 0);
    const auto text = out.str();
    CHECK(text.find("discount_rate,0.1,") != std::string::npos);
    CHECK(text.find("381.13") != std::string::npos);
    CHECK(text.find("# monotonicity scenario: non-increasing") != std::string::npos);
}

TEST_CASE("compare on the toy rejects the fixed goal") {
    cli::CommonOptions common;
    std::ostringstream out, err;
    CHECK(cli::cmd_compare(data_path("scenarios/toy.json"), common, out, err) == 1);
    CHECK(err.str().find("GOAL_UNREACHABLE: no technology offers 100 Mbps under FixedFTTH") != std::string::npos);
    CHECK(out.str().empty());
}
