#pragma once

// Domain types shared by the economics and search layers, plus scenario
// validation. Everything here is plain data: once a ScenarioConfig passes
// validate_scenario it is treated as immutable and may be shared freely.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "migplan/error.hpp"

namespace migplan {

using Year = int;
using Money = double;

enum class Architecture { ADSL, FTTCab, FTTB, FTTH };
enum class Family { Copper, GPON, XGPON, UDWDM, HPON };
enum class SubscriberClass { Residential, Business, ITS };
enum class CurveLabel { Conservative, Realistic, Aggressive, Custom };
enum class DemandLabel { PureResidential, Converged };
enum class GoalPolicy { FlexibleFTTx, FixedFTTH };
enum class OpexMode { Table, Percentage };
enum class CostUnit { PerSubscriberPassed, Absolute };
enum class CapexDiscounting { DecisionYear, None };

inline constexpr SubscriberClass kSubscriberClasses[] = {
    SubscriberClass::Residential, SubscriberClass::Business, SubscriberClass::ITS};

inline constexpr int kAllowedRates[] = {20, 25, 50, 100};

// ---------------------------------------------------------------------------
// Enum <-> text
// ---------------------------------------------------------------------------

inline std::string_view to_string(Architecture a) {
    switch (a) {
        case Architecture::ADSL: return "ADSL";
        case Architecture::FTTCab: return "FTTCab";
        case Architecture::FTTB: return "FTTB";
        case Architecture::FTTH: return "FTTH";
    }
    return "?";
}

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::Copper: return "Copper";
        case Family::GPON: return "GPON";
        case Family::XGPON: return "XGPON";
        case Family::UDWDM: return "UDWDM";
        case Family::HPON: return "HPON";
    }
    return "?";
}

inline std::string_view to_string(SubscriberClass c) {
    switch (c) {
        case SubscriberClass::Residential: return "Residential";
        case SubscriberClass::Business: return "Business";
        case SubscriberClass::ITS: return "ITS";
    }
    return "?";
}

inline std::string_view to_string(CurveLabel l) {
    switch (l) {
        case CurveLabel::Conservative: return "Conservative";
        case CurveLabel::Realistic: return "Realistic";
        case CurveLabel::Aggressive: return "Aggressive";
        case CurveLabel::Custom: return "Custom";
    }
    return "?";
}

inline std::string_view to_string(DemandLabel l) {
    return l == DemandLabel::PureResidential ? "PureResidential" : "Converged";
}

inline std::string_view to_string(GoalPolicy g) {
    return g == GoalPolicy::FlexibleFTTx ? "FlexibleFTTx" : "FixedFTTH";
}

inline std::string_view to_string(OpexMode m) {
    return m == OpexMode::Table ? "table" : "percentage";
}

inline std::string_view to_string(CostUnit u) {
    return u == CostUnit::PerSubscriberPassed ? "per_subscriber_passed" : "absolute";
}

inline std::string_view to_string(CapexDiscounting c) {
    return c == CapexDiscounting::DecisionYear ? "decision_year" : "none";
}

namespace detail {

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view text, const Enum (&values)[N]) {
    for (Enum v : values) {
        if (to_string(v) == text) return v;
    }
    return std::nullopt;
}

}  // namespace detail

inline std::optional<Architecture> parse_architecture(std::string_view s) {
    constexpr Architecture all[] = {Architecture::ADSL, Architecture::FTTCab, Architecture::FTTB,
                                    Architecture::FTTH};
    return detail::parse_enum(s, all);
}

inline std::optional<Family> parse_family(std::string_view s) {
    constexpr Family all[] = {Family::Copper, Family::GPON, Family::XGPON, Family::UDWDM,
                              Family::HPON};
    return detail::parse_enum(s, all);
}

inline std::optional<SubscriberClass> parse_subscriber_class(std::string_view s) {
    return detail::parse_enum(s, kSubscriberClasses);
}

inline std::optional<CurveLabel> parse_curve_label(std::string_view s) {
    constexpr CurveLabel all[] = {CurveLabel::Conservative, CurveLabel::Realistic,
                                  CurveLabel::Aggressive, CurveLabel::Custom};
    return detail::parse_enum(s, all);
}

inline std::optional<DemandLabel> parse_demand_label(std::string_view s) {
    constexpr DemandLabel all[] = {DemandLabel::PureResidential, DemandLabel::Converged};
    return detail::parse_enum(s, all);
}

inline std::optional<GoalPolicy> parse_goal_policy(std::string_view s) {
    if (s == "flexible") return GoalPolicy::FlexibleFTTx;
    if (s == "fixed") return GoalPolicy::FixedFTTH;
    constexpr GoalPolicy all[] = {GoalPolicy::FlexibleFTTx, GoalPolicy::FixedFTTH};
    return detail::parse_enum(s, all);
}

inline std::optional<OpexMode> parse_opex_mode(std::string_view s) {
    constexpr OpexMode all[] = {OpexMode::Table, OpexMode::Percentage};
    return detail::parse_enum(s, all);
}

inline std::optional<CostUnit> parse_cost_unit(std::string_view s) {
    constexpr CostUnit all[] = {CostUnit::PerSubscriberPassed, CostUnit::Absolute};
    return detail::parse_enum(s, all);
}

inline std::optional<CapexDiscounting> parse_capex_discounting(std::string_view s) {
    constexpr CapexDiscounting all[] = {CapexDiscounting::DecisionYear, CapexDiscounting::None};
    return detail::parse_enum(s, all);
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A deployable network state, named "<architecture>_<family>_<rate>".
/// The copper starting point is the single exception and is named "ADSL".
struct Technology {
    std::string id;
    Architecture architecture = Architecture::ADSL;
    Family family = Family::Copper;
    int data_rate = 20;  // Mbps
    int stages = 1;      // remote-node stages
    std::string label;   // optional display name, e.g. "PON1"

    const std::string& display_name() const { return label.empty() ? id : label; }
};

inline std::string canonical_technology_id(const Technology& t) {
    if (t.architecture == Architecture::ADSL) return "ADSL";
    return std::string(to_string(t.architecture)) + "_" + std::string(to_string(t.family)) + "_" +
           std::to_string(t.data_rate);
}

struct Edge {
    std::string from;
    std::string to;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct MigrationGraph {
    std::vector<Technology> nodes;
    std::vector<Edge> edges;

    const Technology* find(std::string_view id) const {
        for (const auto& n : nodes) {
            if (n.id == id) return &n;
        }
        return nullptr;
    }

    std::optional<std::size_t> index_of(std::string_view id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].id == id) return i;
        }
        return std::nullopt;
    }

    /// Out-neighbour ids of `id`, sorted lexicographically, duplicates removed.
    std::vector<std::string> successors(std::string_view id) const {
        std::vector<std::string> out;
        for (const auto& e : edges) {
            if (e.from == id) out.push_back(e.to);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

/// Yearly ARPU per (subscriber class, data rate). Independent of technology family.
struct TariffTable {
    std::map<std::pair<SubscriberClass, int>, Money> arpu;

    std::optional<Money> lookup(SubscriberClass c, int rate) const {
        auto it = arpu.find({c, rate});
        if (it == arpu.end()) return std::nullopt;
        return it->second;
    }

    void set(SubscriberClass c, int rate, Money value) { arpu[{c, rate}] = value; }
};

/// Fraction of the total demand connected in each year. No interpolation.
struct PenetrationCurve {
    CurveLabel label = CurveLabel::Custom;
    std::map<Year, double> values;

    std::optional<double> at(Year y) const {
        auto it = values.find(y);
        if (it == values.end()) return std::nullopt;
        return it->second;
    }
};

struct DemandProfile {
    DemandLabel label = DemandLabel::PureResidential;
    std::map<SubscriberClass, std::int64_t> counts;

    std::int64_t count(SubscriberClass c) const {
        auto it = counts.find(c);
        return it == counts.end() ? 0 : it->second;
    }

    std::int64_t total() const {
        std::int64_t sum = 0;
        for (const auto& [cls, n] : counts) sum += n;
        return sum;
    }
};

struct ChurnModel {
    double churn_rate = 0.10;         // c: share of connected subscribers lost in a churn year
    double churn_probability = 0.10;  // Pr(gamma = 1)
    bool its_exempt = true;

    double probability(int gamma) const { return gamma == 1 ? churn_probability : 1.0 - churn_probability; }
};

struct CapexBreakdown {
    Money civil_works = 0;
    Money fiber = 0;
    Money central_office = 0;
    Money remote_nodes = 0;
    Money buildings = 0;

    /// Everything except civil works.
    Money equipment() const { return fiber + central_office + remote_nodes + buildings; }
    Money total() const { return civil_works + equipment(); }
};

/// Yearly OPEX categories, per connected subscriber.
struct OpexBreakdown {
    Money rent = 0;
    Money energy = 0;
    Money fault_management = 0;
    Money marketing = 0;
    Money operations = 0;

    Money total() const { return rent + energy + fault_management + marketing + operations; }
};

struct CostRecord {
    CapexBreakdown capex;
    std::optional<OpexBreakdown> opex;
    bool assumed = false;
    std::string provenance;
};

struct CostDataset {
    std::string name;
    CostUnit unit = CostUnit::PerSubscriberPassed;
    OpexMode opex_mode = OpexMode::Table;
    Money adsl_opex_per_subscriber = 0.25;
    std::map<std::string, CostRecord> records;

    const CostRecord* find(std::string_view id) const {
        auto it = records.find(std::string(id));
        return it == records.end() ? nullptr : &it->second;
    }
};

struct ScenarioConfig {
    std::string name;
    std::string start_technology;
    MigrationGraph graph;
    TariffTable tariffs;
    PenetrationCurve curve;
    DemandProfile demands;
    ChurnModel churn;
    CostDataset costs;
    Year t_start = 2018;
    int t_mig = 10;  // migration window length in years
    int t_nw = 20;   // network life-cycle in years
    double discount_rate = 0.10;
    GoalPolicy goal = GoalPolicy::FixedFTTH;
    int goal_rate = 100;
    // Under FixedFTTH, allow passing through non-FTTH nodes at or above goal_rate.
    bool fixed_goal_waypoints = false;
    // Reject 100 Mbps migrations between two-stage and single-stage PON families.
    bool family_rule = true;
    // DecisionYear discounts migration CAPEX like any other cash flow; None
    // charges it at face value whenever it is paid.
    CapexDiscounting capex_discounting = CapexDiscounting::DecisionYear;

    Year window_end() const { return t_start + t_mig; }
    Year horizon_end() const { return t_start + t_nw; }
};

// ---------------------------------------------------------------------------
// Graph rules and goal sets
// ---------------------------------------------------------------------------

enum class StageClass { TwoStage, SingleStage, Other };

inline StageClass stage_class(Family f) {
    switch (f) {
        case Family::GPON:
        case Family::XGPON: return StageClass::TwoStage;
        case Family::UDWDM: return StageClass::SingleStage;
        default: return StageClass::Other;
    }
}

/// True when an edge crosses between two-stage and single-stage families and
/// lands on a 100 Mbps deployment.
inline bool violates_family_rule(const Technology& from, const Technology& to) {
    if (to.data_rate != 100) return false;
    const auto a = stage_class(from.family);
    const auto b = stage_class(to.family);
    return a != StageClass::Other && b != StageClass::Other && a != b;
}

inline bool in_goal_set(const Technology& t, GoalPolicy goal, int goal_rate) {
    if (t.data_rate < goal_rate) return false;
    return goal == GoalPolicy::FlexibleFTTx || t.architecture == Architecture::FTTH;
}

/// Nodes that may be entered at all under the goal policy. Under FixedFTTH
/// without waypoints, non-FTTH deployments at the goal rate are excluded.
inline bool enterable(const Technology& t, const ScenarioConfig& cfg) {
    if (cfg.goal == GoalPolicy::FlexibleFTTx || cfg.fixed_goal_waypoints) return true;
    return t.data_rate < cfg.goal_rate || t.architecture == Architecture::FTTH;
}

/// Ids reachable from start (inclusive) over enterable nodes.
inline std::set<std::string> reachable_from_start(const ScenarioConfig& cfg) {
    std::set<std::string> seen;
    if (!cfg.graph.find(cfg.start_technology)) return seen;
    std::queue<std::string> todo;
    todo.push(cfg.start_technology);
    seen.insert(cfg.start_technology);
    while (!todo.empty()) {
        auto cur = todo.front();
        todo.pop();
        for (const auto& next : cfg.graph.successors(cur)) {
            const auto* t = cfg.graph.find(next);
            if (!t || !enterable(*t, cfg) || seen.count(next)) continue;
            seen.insert(next);
            todo.push(next);
        }
    }
    return seen;
}

inline std::set<std::string> goal_candidates(const ScenarioConfig& cfg) {
    std::set<std::string> out;
    for (const auto& n : cfg.graph.nodes) {
        if (in_goal_set(n, cfg.goal, cfg.goal_rate)) out.insert(n.id);
    }
    return out;
}

/// FixedFTTH: FTTH nodes at or above goal_rate. FlexibleFTTx: any node at or
/// above goal_rate. Throws GOAL_UNREACHABLE when the set is empty or none of
/// its members can be reached from the start technology.
inline std::set<std::string> goal_set(const ScenarioConfig& cfg) {
    auto goals = goal_candidates(cfg);
    if (goals.empty()) {
        throw PlanError(ErrorCode::goal_unreachable,
                        "no technology offers " + std::to_string(cfg.goal_rate) + " Mbps under " +
                            std::string(to_string(cfg.goal)));
    }
    const auto reach = reachable_from_start(cfg);
    const bool any = std::any_of(goals.begin(), goals.end(), [&](const auto& g) { return reach.count(g) > 0; });
    if (!any) {
        throw PlanError(ErrorCode::goal_unreachable,
                        "goal set is not reachable from " + cfg.start_technology);
    }
    return goals;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline void add(std::vector<Violation>& out, std::string code, std::string message) {
    out.push_back({std::move(code), std::move(message)});
}

inline std::string rate_key(SubscriberClass c, int rate) {
    return std::string(to_string(c)) + "@" + std::to_string(rate);
}

}  // namespace detail

/// Returns every violated invariant; an empty list means the scenario is usable.
/// Deterministic: violations come out in a fixed order for a given input.
inline std::vector<Violation> validate_scenario(const ScenarioConfig& cfg) {
    using detail::add;
    std::vector<Violation> out;

    // Horizon
    if (cfg.t_mig < 1) add(out, "HORIZON_EMPTY", "migration window must span at least one year");
    if (cfg.t_nw < cfg.t_mig) add(out, "HORIZON_ORDER", "network life-cycle shorter than migration window");
    if (cfg.discount_rate < 0) add(out, "NEGATIVE_DISCOUNT", "discount rate must be >= 0");

    // Technologies
    std::set<std::string> ids;
    for (const auto& t : cfg.graph.nodes) {
        if (!ids.insert(t.id).second) add(out, "DUPLICATE_TECHNOLOGY", "duplicate technology id " + t.id);
        if (t.data_rate <= 0 ||
            std::find(std::begin(kAllowedRates), std::end(kAllowedRates), t.data_rate) == std::end(kAllowedRates)) {
            add(out, "INVALID_RATE", t.id + ": data rate " + std::to_string(t.data_rate) + " Mbps not supported");
        }
        const bool copper = t.architecture == Architecture::ADSL;
        if (copper && (t.family != Family::Copper || t.data_rate != 20)) {
            add(out, "ADSL_INVARIANT", t.id + ": ADSL must be Copper at 20 Mbps");
        }
        if (!copper && t.family == Family::Copper) {
            add(out, "ADSL_INVARIANT", t.id + ": Copper family is only valid for ADSL");
        }
        if (t.stages != 1 && t.stages != 2) add(out, "INVALID_STAGES", t.id + ": stages must be 1 or 2");
        if (t.id != canonical_technology_id(t)) {
            add(out, "TECH_ID_FORMAT", t.id + ": expected id " + canonical_technology_id(t));
        }
    }
    if (!cfg.graph.find(cfg.start_technology)) {
        add(out, "UNKNOWN_START", "start technology " + cfg.start_technology + " is not a graph node");
    }

    // Edges
    std::set<Edge> seen_edges;
    for (const auto& e : cfg.graph.edges) {
        const std::string name = e.from + " -> " + e.to;
        if (!seen_edges.insert(e).second) add(out, "DUPLICATE_EDGE", name);
        if (e.from == e.to) {
            add(out, "SELF_EDGE", name);
            continue;
        }
        const auto* from = cfg.graph.find(e.from);
        const auto* to = cfg.graph.find(e.to);
        if (!from || !to) {
            add(out, "UNKNOWN_NODE", name + ": endpoint " + (!from ? e.from : e.to) + " is not a graph node");
            continue;
        }
        if (to->data_rate < from->data_rate) {
            add(out, "RATE_DOWNGRADE_OR_FAMILY_RULE", name + ": data rate downgrade");
        } else if (cfg.family_rule && violates_family_rule(*from, *to)) {
            add(out, "RATE_DOWNGRADE_OR_FAMILY_RULE", name + ": migration between two-stage and single-stage families");
        }
    }

    // Demands
    for (const auto& [cls, n] : cfg.demands.counts) {
        if (n < 0) add(out, "DEMAND_NEGATIVE", std::string(to_string(cls)) + " demand is negative");
    }
    if (cfg.demands.label == DemandLabel::PureResidential &&
        (cfg.demands.count(SubscriberClass::Business) != 0 || cfg.demands.count(SubscriberClass::ITS) != 0)) {
        add(out, "DEMAND_LABEL", "pure residential scenario has business or ITS demand");
    }

    // Tariffs
    for (const auto& [key, value] : cfg.tariffs.arpu) {
        if (value < 0) add(out, "TARIFF_NEGATIVE", "tariff " + detail::rate_key(key.first, key.second) + " is negative");
    }
    std::set<int> rates;
    for (const auto& t : cfg.graph.nodes) rates.insert(t.data_rate);
    for (SubscriberClass cls : kSubscriberClasses) {
        if (cfg.demands.count(cls) <= 0) continue;
        for (int rate : rates) {
            if (!cfg.tariffs.lookup(cls, rate)) {
                add(out, "TARIFF_MISSING", "no tariff for " + detail::rate_key(cls, rate));
            }
        }
    }

    // Penetration curve
    bool monotone = true;
    std::optional<double> prev;
    for (const auto& [year, v] : cfg.curve.values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            add(out, "CURVE_RANGE", "penetration in " + std::to_string(year) + " outside [0, 1]");
        }
        if (prev && v < *prev) monotone = false;
        prev = v;
    }
    if (!monotone) add(out, "CURVE_NOT_MONOTONE", "penetration curve decreases");
    if (cfg.t_nw >= 0) {
        for (Year y = cfg.t_start; y <= cfg.horizon_end(); ++y) {
            if (!cfg.curve.at(y)) add(out, "CURVE_MISSING_YEAR", "no penetration value for " + std::to_string(y));
        }
    }

    // Churn
    if (!(cfg.churn.churn_rate >= 0.0 && cfg.churn.churn_rate <= 1.0)) {
        add(out, "CHURN_RANGE", "churn rate outside [0, 1]");
    }
    if (!(cfg.churn.churn_probability >= 0.0 && cfg.churn.churn_probability <= 1.0)) {
        add(out, "CHURN_RANGE", "churn probability outside [0, 1]");
    }

    // Costs
    if (cfg.costs.adsl_opex_per_subscriber < 0) add(out, "COST_NEGATIVE", "ADSL OPEX is negative");
    for (const auto& [id, rec] : cfg.costs.records) {
        const auto& c = rec.capex;
        if (c.civil_works < 0 || c.fiber < 0 || c.central_office < 0 || c.remote_nodes < 0 || c.buildings < 0) {
            add(out, "COST_NEGATIVE", id + ": negative CAPEX entry");
        }
        if (rec.opex) {
            const auto& o = *rec.opex;
            if (o.rent < 0 || o.energy < 0 || o.fault_management < 0 || o.marketing < 0 || o.operations < 0) {
                add(out, "COST_NEGATIVE", id + ": negative OPEX entry");
            }
        }
    }
    for (const auto& t : cfg.graph.nodes) {
        if (t.architecture == Architecture::ADSL) continue;
        const auto* rec = cfg.costs.find(t.id);
        if (!rec) {
            add(out, "COST_MISSING", "no cost record for " + t.id);
        } else if (cfg.costs.opex_mode == OpexMode::Table && !rec->opex) {
            add(out, "OPEX_TABLE_MISSING", t.id + ": table OPEX mode needs an OPEX breakdown");
        }
    }

    // Goal
    if (cfg.goal_rate <= 0) add(out, "GOAL_RATE", "goal rate must be positive");
    if (cfg.graph.find(cfg.start_technology)) {
        try {
            (void)goal_set(cfg);
        } catch (const PlanError& e) {
            add(out, "GOAL_UNREACHABLE", e.message());
        }
    }
    return out;
}

}  // namespace migplan
