#pragma once

// Command implementations behind tools/migplan. Each command writes its
// report to `out` (or to CommonOptions::out_path), diagnostics to `err`, and
// returns the process exit code.

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "migplan/expectimax.hpp"
#include "migplan/oracle.hpp"
#include "migplan/scenario_io.hpp"

namespace migplan::cli {

struct CommonOptions {
    OutputFormat output = OutputFormat::Table;
    std::optional<fs::path> out_path;
    bool naive_tree = false;
    std::size_t max_nodes = kDefaultMaxTreeNodes;
};

struct PlanOptions {
    std::optional<GoalPolicy> goal;
    std::optional<std::string> curve;  // library name or path
    std::optional<std::string> costs;
};

enum class SweepParameter { CostDataset, OpexModel, ChurnProbability, ChurnRate, DiscountRate, Curve };

inline std::optional<SweepParameter> parse_sweep_parameter(std::string_view s) {
    if (s == "cost_dataset") return SweepParameter::CostDataset;
    if (s == "opex_model") return SweepParameter::OpexModel;
    if (s == "churn_probability") return SweepParameter::ChurnProbability;
    if (s == "churn_rate") return SweepParameter::ChurnRate;
    if (s == "discount_rate") return SweepParameter::DiscountRate;
    if (s == "curve") return SweepParameter::Curve;
    return std::nullopt;
}

inline std::string_view to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::CostDataset: return "cost_dataset";
        case SweepParameter::OpexModel: return "opex_model";
        case SweepParameter::ChurnProbability: return "churn_probability";
        case SweepParameter::ChurnRate: return "churn_rate";
        case SweepParameter::DiscountRate: return "discount_rate";
        case SweepParameter::Curve: return "curve";
    }
    return "?";
}

struct SweepSpec {
    SweepParameter parameter = SweepParameter::ChurnProbability;
    std::vector<std::string> values;
    fs::path base_scenario;
};

inline SweepSpec load_sweep_spec(const fs::path& path) {
    const auto doc = load_json_file(path);
    const std::string where = path.string();
    SweepSpec spec;
    const auto name = detail::text(detail::field(doc, "parameter", where), where + ".parameter");
    auto p = parse_sweep_parameter(name);
    if (!p) throw PlanError(ErrorCode::invalid_argument, "unknown sweep parameter '" + name + "'");
    spec.parameter = *p;
    for (const auto& v : detail::field(doc, "values", where)) {
        spec.values.push_back(v.is_string() ? v.get<std::string>() : format_decimal(v.get<double>()));
    }
    fs::path base(detail::text(detail::field(doc, "base_scenario", where), where + ".base_scenario"));
    spec.base_scenario = base.is_relative() ? path.parent_path() / base : base;
    return spec;
}

/// Hooks let tests substitute a deliberately broken evaluator.
struct VerifyHooks {
    std::function<PlanResult(const ScenarioConfig&, std::size_t max_nodes)> tree;
    std::function<PlanResult(const ScenarioConfig&)> memoized;
    std::function<OracleResult(const ScenarioConfig&)> oracle;
};

inline bool agree(Money a, Money b, double rel = 1e-9) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) <= rel * scale;
}

namespace detail {

inline PlanResult run_plan(const ScenarioConfig& cfg, const CommonOptions& common) {
    if (common.naive_tree) {
        auto tree = build_tree(cfg, common.max_nodes);
        return evaluate(tree, cfg);
    }
    return evaluate_memoized(cfg);
}

inline void report_error(std::ostream& err, const PlanError& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() != ErrorCode::validation_failed) {
        for (const auto& v : e.violations()) err << "  " << v.code << ": " << v.message << '\n';
    }
}

/// Runs `body` writing into a buffer, then emits it to the chosen sink.
template <typename Body>
int run_command(const CommonOptions& common, std::ostream& out, std::ostream& err, Body body) {
    try {
        std::ostringstream buf;
        const int code = body(buf);
        if (common.out_path) {
            std::ofstream file(*common.out_path, std::ios::binary);
            if (!file) throw PlanError(ErrorCode::io_error, "cannot open " + common.out_path->string() + " for writing");
            file << buf.str();
            if (!file) throw PlanError(ErrorCode::io_error, "failed writing " + common.out_path->string());
        } else {
            out << buf.str();
        }
        return code;
    } catch (const PlanError& e) {
        report_error(err, e);
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

inline const std::vector<std::string>& standard_curves() {
    static const std::vector<std::string> names{"conservative", "realistic", "aggressive"};
    return names;
}

/// Library curves to run, or a single "" (keep the scenario's own curve)
/// when the scenario has no curve library.
inline std::vector<std::string> curves_for(const ScenarioDocument& doc) {
    if (doc.curve_library.empty()) return {""};
    return standard_curves();
}

inline void apply_plan_options(ScenarioDocument& doc, const PlanOptions& opts) {
    if (opts.goal) doc.config.goal = *opts.goal;
    if (opts.curve) doc.use_curve(*opts.curve);
    if (opts.costs) doc.use_costs(*opts.costs);
}

inline double sweep_number(const std::string& v) {
    auto d = parse_decimal(v);
    if (!d) throw PlanError(ErrorCode::invalid_argument, "sweep value '" + v + "' is not a number");
    return *d;
}

}  // namespace detail

/// Loads and validates; prints "OK" or every violation.
inline int cmd_validate(const fs::path& scenario, const CommonOptions& common, std::ostream& out, std::ostream& err) {
    return detail::run_command(common, out, err, [&](std::ostream& o) {
        auto doc = load_scenario_document(scenario);
        const auto violations = validate_scenario(doc.config);
        if (common.output == OutputFormat::Json) {
            json j;
            j["scenario"] = doc.config.name;
            j["valid"] = violations.empty();
            json list = json::array();
            for (const auto& v : violations) list.push_back({{"code", v.code}, {"message", v.message}});
            j["violations"] = list;
            o << j.dump(2) << '\n';
        } else if (common.output == OutputFormat::Csv) {
            o << "code,message\n";
            for (const auto& v : violations) o << v.code << ',' << migplan::detail::csv_field(v.message) << '\n';
        } else if (violations.empty()) {
            o << doc.config.name << ": OK\n";
        } else {
            o << doc.config.name << ": " << violations.size() << " violation(s)\n";
            for (const auto& v : violations) o << "  " << v.code << ": " << v.message << '\n';
        }
        return violations.empty() ? 0 : 1;
    });
}

inline int cmd_plan(const fs::path& scenario, const CommonOptions& common, const PlanOptions& opts,
                    std::ostream& out, std::ostream& err) {
    return detail::run_command(common, out, err, [&](std::ostream& o) {
        auto doc = load_scenario_document(scenario);
        detail::apply_plan_options(doc, opts);
        require_valid(doc.config, scenario.string());
        const auto result = detail::run_plan(doc.config, common);
        write_result(result, common.output, o, &doc.config.graph);
        return 0;
    });
}

/// Both goal policies over the three library curves (or the scenario's own
/// curve), plus the relative gap.
inline int cmd_compare(const fs::path& scenario, const CommonOptions& common, std::ostream& out, std::ostream& err) {
    return detail::run_command(common, out, err, [&](std::ostream& o) {
        auto doc = load_scenario_document(scenario);
        struct Row {
            PlanResult flexible, fixed;
        };
        std::vector<Row> rows;
        for (const auto& curve : detail::curves_for(doc)) {
            if (!curve.empty()) doc.use_curve(curve);
            Row row;
            for (GoalPolicy g : {GoalPolicy::FlexibleFTTx, GoalPolicy::FixedFTTH}) {
                doc.config.goal = g;
                require_valid(doc.config, scenario.string());
                (g == GoalPolicy::FlexibleFTTx ? row.flexible : row.fixed) = detail::run_plan(doc.config, common);
            }
            rows.push_back(std::move(row));
        }
        const auto* graph = &doc.config.graph;
        auto gap = [](const Row& r) { return r.flexible.expected_npv - r.fixed.expected_npv; };
        auto rel = [&](const Row& r) {
            return r.fixed.expected_npv != 0 ? gap(r) / std::abs(r.fixed.expected_npv) : 0.0;
        };
        switch (common.output) {
            case OutputFormat::Json: {
                json j;
                j["scenario"] = doc.config.name;
                json list = json::array();
                for (const auto& r : rows) {
                    list.push_back({{"curve", std::string(to_string(r.flexible.curve))},
                                    {"flexible", result_to_json(r.flexible)},
                                    {"fixed", result_to_json(r.fixed)},
                                    {"gap", format_decimal(gap(r))},
                                    {"relative_gap", format_decimal(rel(r))}});
                }
                j["curves"] = list;
                o << j.dump(2) << '\n';
                break;
            }
            case OutputFormat::Csv:
                o << "goal,curve,path,expected_npv\n";
                for (const auto& r : rows) {
                    for (const auto* res : {&r.flexible, &r.fixed}) {
                        o << to_string(res->goal_used) << ',' << to_string(res->curve) << ','
                          << migplan::detail::csv_field(format_path(res->path, graph)) << ','
                          << format_decimal(res->expected_npv) << '\n';
                    }
                }
                o << "curve,gap,relative_gap\n";
                for (const auto& r : rows) {
                    o << to_string(r.flexible.curve) << ',' << format_decimal(gap(r)) << ',' << format_decimal(rel(r))
                      << '\n';
                }
                break;
            case OutputFormat::Table:
                o << "Goal | Penetration Curve | Migration Path | Net Present Value [C.U.]\n";
                for (const auto* which : {"flexible", "fixed"}) {
                    for (const auto& r : rows) {
                        const auto& res = std::string(which) == "flexible" ? r.flexible : r.fixed;
                        o << to_string(res.goal_used) << " | " << format_table_row(res, graph) << '\n';
                    }
                }
                o << '\n';
                for (const auto& r : rows) {
                    o << to_string(r.flexible.curve) << " gap: " << format_fixed2(gap(r)) << " ("
                      << format_fixed2(100.0 * rel(r)) << "% of fixed)\n";
                }
                break;
        }
        return 0;
    });
}

/// One plan per swept value and curve, as CSV, followed by a monotonicity
/// note per curve for numeric parameters.
inline int cmd_sweep(const SweepSpec& spec, const CommonOptions& common, std::ostream& out, std::ostream& err) {
    return detail::run_command(common, out, err, [&](std::ostream& o) {
        if (spec.values.empty()) throw PlanError(ErrorCode::invalid_argument, "sweep needs at least one value");
        const bool numeric = spec.parameter == SweepParameter::ChurnProbability ||
                             spec.parameter == SweepParameter::ChurnRate ||
                             spec.parameter == SweepParameter::DiscountRate;
        std::vector<std::string> curves = detail::standard_curves();
        if (spec.parameter == SweepParameter::Curve) {
            curves = spec.values;
        } else {
            curves = detail::curves_for(load_scenario_document(spec.base_scenario));
        }

        struct Cell {
            std::string value;
            std::string curve;
            PlanResult result;
            std::string path;
        };
        std::vector<Cell> cells;
        for (const auto& value : spec.values) {
            for (const auto& curve : spec.parameter == SweepParameter::Curve ? std::vector<std::string>{value}
                                                                             : curves) {
                auto doc = load_scenario_document(spec.base_scenario);
                if (!curve.empty()) doc.use_curve(curve);
                auto& cfg = doc.config;
                switch (spec.parameter) {
                    case SweepParameter::CostDataset: doc.use_costs(value); break;
                    case SweepParameter::OpexModel: {
                        auto m = parse_opex_mode(value);
                        if (!m) throw PlanError(ErrorCode::invalid_argument, "unknown OPEX model '" + value + "'");
                        cfg.costs.opex_mode = *m;
                        break;
                    }
                    case SweepParameter::ChurnProbability: cfg.churn.churn_probability = detail::sweep_number(value); break;
                    case SweepParameter::ChurnRate: cfg.churn.churn_rate = detail::sweep_number(value); break;
                    case SweepParameter::DiscountRate: cfg.discount_rate = detail::sweep_number(value); break;
                    case SweepParameter::Curve: break;
                }
                require_valid(cfg, spec.base_scenario.string());
                auto r = detail::run_plan(cfg, common);
                cells.push_back({value, curve, r, format_path(r.path, &cfg.graph)});
            }
        }

        o << "parameter,value,curve,goal,expected_npv,path\n";
        for (const auto& c : cells) {
            o << to_string(spec.parameter) << ',' << migplan::detail::csv_field(c.value) << ','
              << to_string(c.result.curve) << ',' << to_string(c.result.goal_used) << ','
              << format_decimal(c.result.expected_npv) << ',' << migplan::detail::csv_field(c.path) << '\n';
        }
        if (numeric) {
            for (const auto& curve : curves) {
                std::vector<std::pair<double, Money>> series;
                for (const auto& c : cells) {
                    if (c.curve == curve) series.push_back({detail::sweep_number(c.value), c.result.expected_npv});
                }
                std::sort(series.begin(), series.end());
                bool up = true, down = true;
                for (std::size_t i = 1; i < series.size(); ++i) {
                    if (series[i].second < series[i - 1].second) up = false;
                    if (series[i].second > series[i - 1].second) down = false;
                }
                const char* trend = up && down ? "constant" : up ? "non-decreasing" : down ? "non-increasing" : "mixed";
                o << "# monotonicity " << (curve.empty() ? std::string("scenario") : curve) << ": " << trend << " in " << to_string(spec.parameter) << '\n';
            }
        } else {
            o << "# monotonicity: " << to_string(spec.parameter) << " is categorical\n";
        }
        return 0;
    });
}

/// Cross-checks tree, memoized search and oracle. Exit 0 on agreement,
/// 4 on disagreement, 3 if the instance is too large for the oracle.
inline int cmd_verify(const fs::path& scenario, const CommonOptions& common, std::ostream& out, std::ostream& err,
                      VerifyHooks hooks = {}) {
    if (!hooks.tree) {
        hooks.tree = [](const ScenarioConfig& cfg, std::size_t max_nodes) {
            auto tree = build_tree(cfg, max_nodes);
            return evaluate(tree, cfg);
        };
    }
    if (!hooks.memoized) hooks.memoized = [](const ScenarioConfig& cfg) { return evaluate_memoized(cfg); };
    if (!hooks.oracle) hooks.oracle = [](const ScenarioConfig& cfg) { return oracle_best(cfg); };

    return detail::run_command(common, out, err, [&](std::ostream& o) {
        const auto cfg = load_scenario(scenario);
        const auto memo = hooks.memoized(cfg);
        o << "memoized: " << format_decimal(memo.expected_npv) << " | " << format_path(memo.path, &cfg.graph) << '\n';

        std::vector<std::string> diffs;
        bool too_large = false;
        auto compare = [&](const char* name, Money npv, const std::vector<MigrationStep>& path, bool check_path) {
            if (!agree(npv, memo.expected_npv)) {
                diffs.push_back(std::string(name) + " NPV " + format_decimal(npv) + " != memoized " +
                                format_decimal(memo.expected_npv));
            }
            if (check_path && path != memo.path) {
                diffs.push_back(std::string(name) + " path '" + format_path(path, &cfg.graph) + "' != memoized '" +
                                format_path(memo.path, &cfg.graph) + "'");
            }
        };

        try {
            const auto tree = hooks.tree(cfg, common.max_nodes);
            o << "tree: " << format_decimal(tree.expected_npv) << " | " << format_path(tree.path, &cfg.graph) << '\n';
            compare("tree", tree.expected_npv, tree.path, true);
        } catch (const PlanError& e) {
            if (e.code() != ErrorCode::tree_too_large) throw;
            o << "tree: skipped (" << e.what() << ")\n";
        }

        try {
            const auto oracle = hooks.oracle(cfg);
            o << "oracle: " << format_decimal(oracle.expected_npv) << " | " << format_path(oracle.path, &cfg.graph) << " ("
              << oracle.policies_enumerated << " policies)\n";
            // When churn is certain the no-churn branch is unreachable and any
            // action there is optimal; only values are comparable then.
            compare("oracle", oracle.expected_npv, oracle.path, cfg.churn.churn_probability < 1.0);
        } catch (const PlanError& e) {
            if (e.code() != ErrorCode::instance_too_large) throw;
            o << "oracle: skipped (" << e.what() << ")\n";
            too_large = true;
        }

        if (!diffs.empty()) {
            o << "DISAGREEMENT\n";
            for (const auto& d : diffs) o << "  " << d << '\n';
            err << "error: DISAGREEMENT: " << diffs.size() << " difference(s)\n";
            return exit_code_for(ErrorCode::disagreement);
        }
        if (too_large) {
            err << "error: INSTANCE_TOO_LARGE: oracle refused the instance\n";
            return exit_code_for(ErrorCode::instance_too_large);
        }
        o << "AGREE\n";
        return 0;
    });
}

}  // namespace migplan::cli
