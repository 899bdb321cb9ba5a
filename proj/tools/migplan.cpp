// migplan: plan, compare, sweep and verify network migration scenarios.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "migplan/cli.hpp"

namespace {

using namespace migplan;

// Fills options from a JSON config file; explicit flags take precedence.
void apply_config(const fs::path& path, const CLI::App& app, cli::CommonOptions& common, cli::PlanOptions& plan,
                  std::string& param, std::vector<std::string>& values) {
    const auto doc = load_json_file(path);
    const std::string where = path.string();
    auto given = [&](const char* flag) {
        try {
            if (app.count(flag) > 0) return true;
        } catch (const CLI::OptionNotFound&) {
        }
        for (const auto* sub : app.get_subcommands()) {
            try {
                if (sub->count(flag) > 0) return true;
            } catch (const CLI::OptionNotFound&) {
            }
        }
        return false;
    };
    if (const auto* v = detail::optional_field(doc, "output"); v && !given("--output")) {
        auto f = parse_output_format(detail::text(*v, where + ".output"));
        if (!f) throw PlanError(ErrorCode::invalid_argument, where + ": unknown output format");
        common.output = *f;
    }
    if (const auto* v = detail::optional_field(doc, "out"); v && !given("--out")) {
        common.out_path = detail::text(*v, where + ".out");
    }
    if (const auto* v = detail::optional_field(doc, "naive_tree"); v && !given("--naive-tree")) {
        common.naive_tree = detail::boolean(*v, where + ".naive_tree");
    }
    if (const auto* v = detail::optional_field(doc, "max_nodes"); v && !given("--max-nodes")) {
        common.max_nodes = static_cast<std::size_t>(detail::integer(*v, where + ".max_nodes"));
    }
    if (const auto* v = detail::optional_field(doc, "goal"); v && !given("--goal")) {
        plan.goal = detail::enum_value<GoalPolicy>(*v, where + ".goal", parse_goal_policy);
    }
    if (const auto* v = detail::optional_field(doc, "curve"); v && !given("--curve")) {
        plan.curve = detail::text(*v, where + ".curve");
    }
    if (const auto* v = detail::optional_field(doc, "costs"); v && !given("--costs")) {
        plan.costs = detail::text(*v, where + ".costs");
    }
    if (const auto* v = detail::optional_field(doc, "param"); v && !given("--param")) {
        param = detail::text(*v, where + ".param");
    }
    if (const auto* v = detail::optional_field(doc, "values"); v && !given("--values")) {
        values.clear();
        for (const auto& e : *v) values.push_back(e.is_string() ? e.get<std::string>() : format_decimal(e.get<double>()));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Techno-economic access network migration planner"};
    app.require_subcommand(1);

    cli::CommonOptions common;
    cli::PlanOptions plan;
    std::string output = "table";
    std::string out_path;
    std::string config_path;
    std::string goal;
    std::string scenario;
    std::string param;
    std::vector<std::string> values;
    std::string spec_path;

    app.add_option("--output", output, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));
    app.add_option("--out", out_path, "Write the report to PATH instead of stdout");
    app.add_flag("--naive-tree", common.naive_tree, "Build and evaluate the full tree");
    app.add_option("--max-nodes", common.max_nodes, "Node limit for the full tree");
    app.add_option("--config", config_path, "JSON file with option defaults")->check(CLI::ExistingFile);

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("scenario", scenario, "Scenario JSON")->required();

    auto* plan_cmd = app.add_subcommand("plan", "Compute the optimal migration policy");
    plan_cmd->add_option("scenario", scenario, "Scenario JSON")->required();
    plan_cmd->add_option("--goal", goal, "flexible or fixed")->check(CLI::IsMember({"flexible", "fixed"}));
    plan_cmd->add_option("--curve", plan.curve, "Curve library entry or file");
    plan_cmd->add_option("--costs", plan.costs, "Cost library entry or file");

    auto* compare = app.add_subcommand("compare", "Flexible vs fixed goal over all curves");
    compare->add_option("scenario", scenario, "Scenario JSON")->required();

    auto* sweep = app.add_subcommand("sweep", "Sensitivity sweep, CSV output");
    sweep->add_option("scenario", scenario, "Base scenario JSON");
    sweep->add_option("--param", param, "cost_dataset, opex_model, churn_probability, churn_rate, discount_rate, curve");
    sweep->add_option("--values", values, "Comma separated values")->delimiter(',');
    sweep->add_option("--spec", spec_path, "Sweep spec JSON")->check(CLI::ExistingFile);

    auto* verify = app.add_subcommand("verify", "Cross-check tree, memoized search and oracle");
    verify->add_option("scenario", scenario, "Scenario JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        common.output = *parse_output_format(output);
        if (!out_path.empty()) common.out_path = out_path;
        if (!goal.empty()) plan.goal = parse_goal_policy(goal);
        if (!config_path.empty()) apply_config(config_path, app, common, plan, param, values);
    } catch (const PlanError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }

    if (*validate) return cli::cmd_validate(scenario, common, std::cout, std::cerr);
    if (*plan_cmd) return cli::cmd_plan(scenario, common, plan, std::cout, std::cerr);
    if (*compare) return cli::cmd_compare(scenario, common, std::cout, std::cerr);
    if (*verify) return cli::cmd_verify(scenario, common, std::cout, std::cerr);

    cli::SweepSpec spec;
    try {
        if (!spec_path.empty()) {
            spec = cli::load_sweep_spec(spec_path);
        } else {
            auto p = cli::parse_sweep_parameter(param);
            if (!p) throw PlanError(ErrorCode::invalid_argument, "--param must name a sweep parameter");
            spec.parameter = *p;
        }
        if (!param.empty() && !spec_path.empty()) {
            auto p = cli::parse_sweep_parameter(param);
            if (!p) throw PlanError(ErrorCode::invalid_argument, "--param must name a sweep parameter");
            spec.parameter = *p;
        }
        if (!values.empty()) spec.values = values;
        if (!scenario.empty()) spec.base_scenario = scenario;
        if (spec.base_scenario.empty()) throw PlanError(ErrorCode::invalid_argument, "sweep needs a base scenario");
    } catch (const PlanError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
    return cli::cmd_sweep(spec, common, std::cout, std::cerr);
}
