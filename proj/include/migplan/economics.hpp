#pragma once

// Monetary formulas: churned revenue, discounting, NPV, migration CAPEX and
// both OPEX models. All functions are pure.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "migplan/model.hpp"

namespace migplan {

struct CashFlow {
    Year year = 0;
    Money amount = 0;  // inflow positive
};

/// CAPEX for moving between two deployments. κ opens the civil-works delta
/// when the architecture changes, υ opens the equipment delta when the data
/// rate changes.
struct MigrationCost {
    std::string from_id;
    std::string to_id;
    Money civil_delta = 0;
    Money equip_delta = 0;
    bool kappa = false;
    bool upsilon = false;
    Money total = 0;
};

/// n_{q,t}: connected subscribers of one class in a year.
inline double connected_subscribers(const ScenarioConfig& cfg, SubscriberClass cls, Year year) {
    const auto share = cfg.curve.at(year);
    if (!share) {
        throw PlanError(ErrorCode::validation_failed, "no penetration value for " + std::to_string(year));
    }
    return *share * static_cast<double>(cfg.demands.count(cls));
}

inline double connected_subscribers(const ScenarioConfig& cfg, Year year) {
    double n = 0;
    for (SubscriberClass cls : kSubscriberClasses) n += connected_subscribers(cfg, cls, year);
    return n;
}

/// Revenue of one year at the tariff of `tech`'s data rate. In a churn year
/// (gamma = 1) the non-exempt classes earn (1 - c) of their revenue.
inline Money yearly_revenue(const ScenarioConfig& cfg, const Technology& tech, Year year, int gamma) {
    Money total = 0;
    for (SubscriberClass cls : kSubscriberClasses) {
        if (cfg.demands.count(cls) == 0) continue;
        const auto arpu = cfg.tariffs.lookup(cls, tech.data_rate);
        if (!arpu) {
            throw PlanError(ErrorCode::tariff_missing, "no " + std::string(to_string(cls)) + " tariff at " +
                                                           std::to_string(tech.data_rate) + " Mbps");
        }
        const bool exempt = cls == SubscriberClass::ITS && cfg.churn.its_exempt;
        const double factor = (gamma == 1 && !exempt) ? (1.0 - cfg.churn.churn_rate) : 1.0;
        total += factor * connected_subscribers(cfg, cls, year) * *arpu;
    }
    return total;
}

inline Money present_value(Money amount, Year year, const ScenarioConfig& cfg) {
    const int exponent = year - cfg.t_start;
    if (exponent == 0) return amount;
    return amount / std::pow(1.0 + cfg.discount_rate, exponent);
}

inline Money npv(std::span<const CashFlow> flows, const ScenarioConfig& cfg) {
    Money sum = 0;
    for (const auto& f : flows) sum += present_value(f.amount, f.year, cfg);
    return sum;
}

/// Absolute CAPEX of a deployment; the copper plant carries none.
inline CapexBreakdown absolute_capex(const Technology& tech, const ScenarioConfig& cfg) {
    if (tech.architecture == Architecture::ADSL) return {};
    const auto* rec = cfg.costs.find(tech.id);
    if (!rec) throw PlanError(ErrorCode::cost_missing, "no cost record for " + tech.id);
    CapexBreakdown c = rec->capex;
    if (cfg.costs.unit == CostUnit::PerSubscriberPassed) {
        const double passed = static_cast<double>(cfg.demands.total());
        c.civil_works *= passed;
        c.fiber *= passed;
        c.central_office *= passed;
        c.remote_nodes *= passed;
        c.buildings *= passed;
    }
    return c;
}

inline MigrationCost migration_capex(const Technology& from, const Technology& to, const ScenarioConfig& cfg) {
    const auto a = absolute_capex(from, cfg);
    const auto b = absolute_capex(to, cfg);
    MigrationCost m;
    m.from_id = from.id;
    m.to_id = to.id;
    m.civil_delta = std::max(0.0, b.civil_works - a.civil_works);
    m.equip_delta = std::max(0.0, b.equipment() - a.equipment());
    m.kappa = from.architecture != to.architecture;
    m.upsilon = from.data_rate != to.data_rate;
    m.total = (m.kappa ? m.civil_delta : 0.0) + (m.upsilon ? m.equip_delta : 0.0);
    return m;
}

/// Value at T_start of migration CAPEX paid in `year`.
inline Money migration_capex_pv(Money amount, Year year, const ScenarioConfig& cfg) {
    if (cfg.capex_discounting == CapexDiscounting::None) return amount;
    return present_value(amount, year, cfg);
}

/// Fraction-of-CAPEX OPEX model: 10 % of electronics plus 1 % of civil works.
inline Money percentage_opex(Money electronics_capex, Money civil_works_capex) {
    return 0.1 * electronics_capex + 0.01 * civil_works_capex;
}

/// Yearly OPEX of running `tech` in `year`.
///
/// Table mode charges the category sum per connected subscriber. Percentage
/// mode applies percentage_opex to the deployment's absolute CAPEX, scaled by
/// the share of the plant in use (connected / passed). Copper always costs
/// adsl_opex_per_subscriber per connected subscriber.
inline Money opex(const Technology& tech, Year year, const ScenarioConfig& cfg) {
    const double connected = connected_subscribers(cfg, year);
    if (tech.architecture == Architecture::ADSL) return cfg.costs.adsl_opex_per_subscriber * connected;
    const auto* rec = cfg.costs.find(tech.id);
    if (!rec) throw PlanError(ErrorCode::cost_missing, "no cost record for " + tech.id);
    if (cfg.costs.opex_mode == OpexMode::Table) {
        if (!rec->opex) throw PlanError(ErrorCode::cost_missing, "no OPEX breakdown for " + tech.id);
        return rec->opex->total() * connected;
    }
    const double passed = static_cast<double>(cfg.demands.total());
    if (passed <= 0) return 0.0;
    const auto c = absolute_capex(tech, cfg);
    return percentage_opex(c.equipment(), c.civil_works) * (connected / passed);
}

/// Discounted net flow (revenue minus OPEX) of a single year.
inline Money discounted_net_flow(const ScenarioConfig& cfg, const Technology& tech, Year year, int gamma) {
    return present_value(yearly_revenue(cfg, tech, year, gamma) - opex(tech, year, cfg), year, cfg);
}

/// Value of holding `tech` from `year` to the end of the life-cycle with no
/// further decisions. `gamma` applies to the first year only; later years
/// assume no churn.
inline Money terminal_value(const Technology& tech, Year year, const ScenarioConfig& cfg, int gamma = 0) {
    Money sum = 0;
    for (Year i = year; i <= cfg.horizon_end(); ++i) {
        sum += discounted_net_flow(cfg, tech, i, i == year ? gamma : 0);
    }
    return sum;
}

}  // namespace migplan
