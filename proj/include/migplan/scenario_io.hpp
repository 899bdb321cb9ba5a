#pragma once

// JSON scenario documents, cost datasets, penetration curves and results.
//
// Money and fractions are written as shortest round-trip decimal strings and
// read back with from_chars, so files are locale independent and reload to
// the same doubles. Readers also accept plain JSON numbers.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "migplan/expectimax.hpp"
#include "migplan/model.hpp"

namespace migplan {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;

enum class OutputFormat { Json, Csv, Table };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    if (s == "table") return OutputFormat::Table;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Decimal text
// ---------------------------------------------------------------------------

/// Shortest decimal string that reads back to exactly `v`.
inline std::string format_decimal(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

inline std::optional<double> parse_decimal(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_integer(std::string_view s) {
    long long v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

/// Fixed two-decimal rendering for human tables.
inline std::string format_fixed2(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// Field access with schema errors
// ---------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
    throw PlanError(ErrorCode::parse_error, where + ": " + what);
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) schema_error(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(where, std::string("missing key '") + key + "'");
    return *it;
}

inline const json* optional_field(const json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline double number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        if (auto d = parse_decimal(v.get_ref<const std::string&>())) return *d;
        schema_error(where, "'" + v.get<std::string>() + "' is not a decimal number");
    }
    schema_error(where, "expected a number or decimal string");
}

inline long long integer(const json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_string()) {
        if (auto i = parse_integer(v.get_ref<const std::string&>())) return *i;
    }
    schema_error(where, "expected an integer");
}

inline std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) schema_error(where, "expected a string");
    return v.get<std::string>();
}

inline bool boolean(const json& v, const std::string& where) {
    if (!v.is_boolean()) schema_error(where, "expected true or false");
    return v.get<bool>();
}

template <typename T, typename Parse>
T enum_value(const json& v, const std::string& where, Parse parse) {
    const auto s = text(v, where);
    auto e = parse(s);
    if (!e) schema_error(where, "unknown value '" + s + "'");
    return *e;
}

inline void check_version(const json& doc, const std::string& where) {
    if (const auto* v = optional_field(doc, "format_version")) {
        if (integer(*v, where + ".format_version") != kFormatVersion) {
            schema_error(where, "unsupported format_version");
        }
    }
}

/// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace detail

inline std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PlanError(ErrorCode::io_error, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw PlanError(ErrorCode::io_error, "cannot read " + path.string());
    return ss.str();
}

/// Parses JSON text; PARSE_ERROR messages carry "<source>:<line>:<col>".
inline json parse_json_text(std::string_view text, const std::string& source) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, col] = detail::line_col(text, offset);
        std::string what = e.what();
        if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        throw PlanError(ErrorCode::parse_error,
                        source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
}

inline json load_json_file(const fs::path& path) {
    return parse_json_text(read_text_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Curves and cost datasets
// ---------------------------------------------------------------------------

inline PenetrationCurve parse_curve(const json& doc, const std::string& where) {
    detail::check_version(doc, where);
    PenetrationCurve c;
    if (const auto* l = detail::optional_field(doc, "label")) {
        c.label = detail::enum_value<CurveLabel>(*l, where + ".label", parse_curve_label);
    }
    const auto& values = detail::field(doc, "values", where);
    if (!values.is_object()) detail::schema_error(where + ".values", "expected a year -> fraction object");
    for (const auto& [year, v] : values.items()) {
        const auto y = parse_integer(year);
        if (!y) detail::schema_error(where + ".values", "'" + year + "' is not a year");
        c.values[static_cast<Year>(*y)] = detail::number(v, where + ".values." + year);
    }
    return c;
}

inline PenetrationCurve load_curve(const fs::path& path) {
    return parse_curve(load_json_file(path), path.string());
}

inline CostDataset parse_cost_dataset(const json& doc, const std::string& where) {
    detail::check_version(doc, where);
    CostDataset d;
    if (const auto* v = detail::optional_field(doc, "name")) d.name = detail::text(*v, where + ".name");
    if (const auto* v = detail::optional_field(doc, "unit")) {
        d.unit = detail::enum_value<CostUnit>(*v, where + ".unit", parse_cost_unit);
    }
    if (const auto* v = detail::optional_field(doc, "opex_mode")) {
        d.opex_mode = detail::enum_value<OpexMode>(*v, where + ".opex_mode", parse_opex_mode);
    }
    if (const auto* v = detail::optional_field(doc, "adsl_opex_per_subscriber")) {
        d.adsl_opex_per_subscriber = detail::number(*v, where + ".adsl_opex_per_subscriber");
    }
    const auto& records = detail::field(doc, "records", where);
    if (!records.is_object()) detail::schema_error(where + ".records", "expected an object keyed by technology id");
    for (const auto& [id, r] : records.items()) {
        const std::string at = where + ".records." + id;
        CostRecord rec;
        const auto& cx = detail::field(r, "capex", at);
        rec.capex.civil_works = detail::number(detail::field(cx, "civil_works", at + ".capex"), at + ".capex.civil_works");
        rec.capex.fiber = detail::number(detail::field(cx, "fiber", at + ".capex"), at + ".capex.fiber");
        rec.capex.central_office =
            detail::number(detail::field(cx, "central_office", at + ".capex"), at + ".capex.central_office");
        rec.capex.remote_nodes =
            detail::number(detail::field(cx, "remote_nodes", at + ".capex"), at + ".capex.remote_nodes");
        rec.capex.buildings = detail::number(detail::field(cx, "buildings", at + ".capex"), at + ".capex.buildings");
        if (const auto* ox = detail::optional_field(r, "opex")) {
            OpexBreakdown o;
            o.rent = detail::number(detail::field(*ox, "rent", at + ".opex"), at + ".opex.rent");
            o.energy = detail::number(detail::field(*ox, "energy", at + ".opex"), at + ".opex.energy");
            o.fault_management =
                detail::number(detail::field(*ox, "fault_management", at + ".opex"), at + ".opex.fault_management");
            o.marketing = detail::number(detail::field(*ox, "marketing", at + ".opex"), at + ".opex.marketing");
            o.operations = detail::number(detail::field(*ox, "operations", at + ".opex"), at + ".opex.operations");
            rec.opex = o;
        }
        if (const auto* v = detail::optional_field(r, "assumed")) rec.assumed = detail::boolean(*v, at + ".assumed");
        if (const auto* v = detail::optional_field(r, "provenance")) rec.provenance = detail::text(*v, at + ".provenance");
        d.records[id] = rec;
    }
    return d;
}

inline CostDataset load_cost_dataset(const fs::path& path) {
    return parse_cost_dataset(load_json_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

/// A parsed scenario plus the named curve and cost files it can switch to.
struct ScenarioDocument {
    ScenarioConfig config;
    fs::path path;
    std::map<std::string, fs::path> curve_library;  // name -> resolved path
    std::map<std::string, fs::path> cost_library;
    std::string curve_name;  // library entry in use, empty when inline
    std::string cost_name;

    /// Loads a library curve (or a path relative to the scenario) into config.
    void use_curve(const std::string& name_or_path) {
        const auto p = resolve(curve_library, name_or_path);
        config.curve = load_curve(p);
        curve_name = name_or_path;
    }

    void use_costs(const std::string& name_or_path) {
        const auto p = resolve(cost_library, name_or_path);
        config.costs = load_cost_dataset(p);
        cost_name = name_or_path;
    }

    fs::path resolve(const std::map<std::string, fs::path>& lib, const std::string& name_or_path) const {
        if (auto it = lib.find(name_or_path); it != lib.end()) return it->second;
        fs::path p(name_or_path);
        if (p.is_relative()) p = path.parent_path() / p;
        if (!fs::exists(p)) {
            throw PlanError(ErrorCode::io_error, "'" + name_or_path + "' is neither a library entry nor a file");
        }
        return p;
    }
};

namespace detail {

inline std::map<std::string, fs::path> parse_library(const json* lib, const fs::path& base, const std::string& where) {
    std::map<std::string, fs::path> out;
    if (!lib) return out;
    if (!lib->is_object()) schema_error(where, "expected a name -> path object");
    for (const auto& [name, v] : lib->items()) {
        fs::path p(text(v, where + "." + name));
        out[name] = p.is_relative() ? base / p : p;
    }
    return out;
}

inline Technology parse_technology(const json& t, const std::string& at) {
    Technology tech;
    tech.id = text(field(t, "id", at), at + ".id");
    tech.architecture = enum_value<Architecture>(field(t, "architecture", at), at + ".architecture", parse_architecture);
    tech.family = enum_value<Family>(field(t, "family", at), at + ".family", parse_family);
    tech.data_rate = static_cast<int>(integer(field(t, "data_rate", at), at + ".data_rate"));
    if (const auto* v = optional_field(t, "stages")) tech.stages = static_cast<int>(integer(*v, at + ".stages"));
    if (const auto* v = optional_field(t, "label")) tech.label = text(*v, at + ".label");
    return tech;
}

}  // namespace detail

/// Parses a scenario document without validating it. Curve and cost
/// references are resolved against `base_dir`.
inline ScenarioDocument parse_scenario_document(const json& doc, const fs::path& path) {
    using namespace detail;
    const std::string where = path.string();
    const fs::path base = path.parent_path();
    check_version(doc, where);

    ScenarioDocument out;
    out.path = path;
    out.curve_library = parse_library(optional_field(doc, "curve_library"), base, where + ".curve_library");
    out.cost_library = parse_library(optional_field(doc, "cost_library"), base, where + ".cost_library");

    auto& cfg = out.config;
    if (const auto* v = optional_field(doc, "name")) cfg.name = text(*v, where + ".name");
    cfg.start_technology = text(field(doc, "start", where), where + ".start");

    const auto& techs = field(doc, "technologies", where);
    if (!techs.is_array()) schema_error(where + ".technologies", "expected an array");
    for (std::size_t i = 0; i < techs.size(); ++i) {
        cfg.graph.nodes.push_back(parse_technology(techs[i], where + ".technologies[" + std::to_string(i) + "]"));
    }
    const auto& edges = field(doc, "edges", where);
    if (!edges.is_array()) schema_error(where + ".edges", "expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string at = where + ".edges[" + std::to_string(i) + "]";
        cfg.graph.edges.push_back({text(field(edges[i], "from", at), at + ".from"),
                                   text(field(edges[i], "to", at), at + ".to")});
    }

    const auto& tariffs = field(doc, "tariffs", where);
    if (!tariffs.is_object()) schema_error(where + ".tariffs", "expected a class -> rate -> ARPU object");
    for (const auto& [cls_name, rates] : tariffs.items()) {
        const std::string at = where + ".tariffs." + cls_name;
        const auto cls = parse_subscriber_class(cls_name);
        if (!cls) schema_error(at, "unknown subscriber class");
        if (!rates.is_object()) schema_error(at, "expected a rate -> ARPU object");
        for (const auto& [rate, v] : rates.items()) {
            const auto r = parse_integer(rate);
            if (!r) schema_error(at, "'" + rate + "' is not a data rate");
            cfg.tariffs.set(*cls, static_cast<int>(*r), number(v, at + "." + rate));
        }
    }

    const auto& curve = field(doc, "curve", where);
    if (const auto* ref = optional_field(curve, "ref")) {
        out.use_curve(text(*ref, where + ".curve.ref"));
    } else {
        cfg.curve = parse_curve(curve, where + ".curve");
    }

    const auto& demands = field(doc, "demands", where);
    cfg.demands.label = enum_value<DemandLabel>(field(demands, "label", where + ".demands"), where + ".demands.label",
                                                parse_demand_label);
    const auto& counts = field(demands, "counts", where + ".demands");
    if (!counts.is_object()) schema_error(where + ".demands.counts", "expected a class -> count object");
    for (const auto& [cls_name, n] : counts.items()) {
        const auto cls = parse_subscriber_class(cls_name);
        if (!cls) schema_error(where + ".demands.counts", "unknown subscriber class '" + cls_name + "'");
        cfg.demands.counts[*cls] = integer(n, where + ".demands.counts." + cls_name);
    }

    if (const auto* churn = optional_field(doc, "churn")) {
        const std::string at = where + ".churn";
        if (const auto* v = optional_field(*churn, "churn_rate")) cfg.churn.churn_rate = number(*v, at + ".churn_rate");
        if (const auto* v = optional_field(*churn, "churn_probability")) {
            cfg.churn.churn_probability = number(*v, at + ".churn_probability");
        }
        if (const auto* v = optional_field(*churn, "its_exempt")) cfg.churn.its_exempt = boolean(*v, at + ".its_exempt");
    }

    if (const auto* costs = optional_field(doc, "costs")) {
        cfg.costs = parse_cost_dataset(*costs, where + ".costs");
    } else if (const auto* ref = optional_field(doc, "costs_ref")) {
        out.use_costs(text(*ref, where + ".costs_ref"));
    } else {
        schema_error(where, "needs either 'costs' or 'costs_ref'");
    }

    const auto& horizon = field(doc, "horizon", where);
    cfg.t_start = static_cast<Year>(integer(field(horizon, "T_start", where + ".horizon"), where + ".horizon.T_start"));
    cfg.t_mig = static_cast<int>(integer(field(horizon, "T_mig", where + ".horizon"), where + ".horizon.T_mig"));
    cfg.t_nw = static_cast<int>(integer(field(horizon, "T_NW", where + ".horizon"), where + ".horizon.T_NW"));
    cfg.discount_rate = number(field(doc, "discount_rate", where), where + ".discount_rate");

    const auto& goal = field(doc, "goal", where);
    cfg.goal = enum_value<GoalPolicy>(field(goal, "policy", where + ".goal"), where + ".goal.policy", parse_goal_policy);
    if (const auto* v = optional_field(goal, "rate")) cfg.goal_rate = static_cast<int>(integer(*v, where + ".goal.rate"));
    if (const auto* v = optional_field(goal, "fixed_waypoints")) {
        cfg.fixed_goal_waypoints = boolean(*v, where + ".goal.fixed_waypoints");
    }
    if (const auto* v = optional_field(doc, "family_rule")) cfg.family_rule = boolean(*v, where + ".family_rule");
    if (const auto* v = optional_field(doc, "capex_discounting")) {
        cfg.capex_discounting =
            enum_value<CapexDiscounting>(*v, where + ".capex_discounting", parse_capex_discounting);
    }
    return out;
}

inline void require_valid(const ScenarioConfig& cfg, const std::string& source) {
    auto violations = validate_scenario(cfg);
    if (violations.empty()) return;
    std::string msg = source + ": " + std::to_string(violations.size()) + " violation(s)";
    for (const auto& v : violations) msg += "\n  " + v.code + ": " + v.message;
    throw PlanError(ErrorCode::validation_failed, msg, std::move(violations));
}

/// Parses a scenario file and its references. Does not validate.
inline ScenarioDocument load_scenario_document(const fs::path& path) {
    return parse_scenario_document(load_json_file(path), path);
}

/// Loads and validates a scenario. VALIDATION_FAILED carries every violation.
inline ScenarioConfig load_scenario(const fs::path& path) {
    auto doc = load_scenario_document(path);
    require_valid(doc.config, path.string());
    return std::move(doc.config);
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

namespace detail {

inline std::string display(const std::string& id, const MigrationGraph* graph) {
    if (graph) {
        if (const auto* t = graph->find(id)) return t->display_name();
    }
    return id;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

/// "2019: X / 2020: Y", or "No Migrations".
inline std::string format_path(const std::vector<MigrationStep>& path, const MigrationGraph* graph = nullptr) {
    if (path.empty()) return "No Migrations";
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += " / ";
        out += std::to_string(path[i].year) + ": " + detail::display(path[i].technology, graph);
    }
    return out;
}

/// One table row: "<curve> | <path> | <NPV>".
inline std::string format_table_row(const PlanResult& r, const MigrationGraph* graph = nullptr) {
    return std::string(to_string(r.curve)) + " | " + format_path(r.path, graph) + " | " + format_fixed2(r.expected_npv);
}

inline json result_to_json(const PlanResult& r) {
    json j;
    j["format_version"] = kFormatVersion;
    j["expected_npv"] = format_decimal(r.expected_npv);
    j["goal"] = std::string(to_string(r.goal_used));
    j["curve"] = std::string(to_string(r.curve));
    json path = json::array();
    for (const auto& s : r.path) path.push_back({{"year", s.year}, {"technology", s.technology}});
    j["path"] = path;
    json policy = json::array();
    for (const auto& [state, action] : r.policy) {
        policy.push_back({{"year", state.year},
                          {"technology", state.technology},
                          {"gamma", state.gamma},
                          {"action", action.migrate_to ? *action.migrate_to : std::string("stay")}});
    }
    j["policy"] = policy;
    return j;
}

inline PlanResult result_from_json(const json& j, const std::string& where = "result") {
    using namespace detail;
    check_version(j, where);
    PlanResult r;
    r.expected_npv = number(field(j, "expected_npv", where), where + ".expected_npv");
    r.goal_used = enum_value<GoalPolicy>(field(j, "goal", where), where + ".goal", parse_goal_policy);
    r.curve = enum_value<CurveLabel>(field(j, "curve", where), where + ".curve", parse_curve_label);
    for (const auto& s : field(j, "path", where)) {
        r.path.push_back({static_cast<Year>(integer(field(s, "year", where + ".path"), where + ".path.year")),
                          text(field(s, "technology", where + ".path"), where + ".path.technology")});
    }
    if (const auto* p = optional_field(j, "policy")) {
        for (const auto& e : *p) {
            const std::string at = where + ".policy";
            DecisionState st{static_cast<Year>(integer(field(e, "year", at), at + ".year")),
                             text(field(e, "technology", at), at + ".technology"),
                             static_cast<int>(integer(field(e, "gamma", at), at + ".gamma"))};
            const auto action = text(field(e, "action", at), at + ".action");
            Action a;
            if (action != "stay") a.migrate_to = action;
            r.policy[st] = a;
        }
    }
    return r;
}

inline PlanResult load_result(const fs::path& path) {
    return result_from_json(load_json_file(path), path.string());
}

inline void write_result(const PlanResult& r, OutputFormat format, std::ostream& out,
                         const MigrationGraph* graph = nullptr) {
    switch (format) {
        case OutputFormat::Json:
            out << result_to_json(r).dump(2) << '\n';
            break;
        case OutputFormat::Csv:
            out << "row,year,technology,label,curve,goal,expected_npv\n";
            for (const auto& s : r.path) {
                out << "step," << s.year << ',' << detail::csv_field(s.technology) << ','
                    << detail::csv_field(detail::display(s.technology, graph)) << ",,,\n";
            }
            out << "summary,,,," << to_string(r.curve) << ',' << to_string(r.goal_used) << ','
                << format_decimal(r.expected_npv) << '\n';
            break;
        case OutputFormat::Table:
            out << "Penetration Curve | Migration Path | Net Present Value [C.U.]\n";
            out << format_table_row(r, graph) << '\n';
            break;
    }
    if (!out) throw PlanError(ErrorCode::io_error, "failed to write result");
}

inline void write_result(const PlanResult& r, OutputFormat format, const fs::path& path,
                         const MigrationGraph* graph = nullptr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PlanError(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
    write_result(r, format, out, graph);
}

}  // namespace migplan
