#pragma once

// The five assessment criteria of a simulated configuration, each a fraction in [0,1]:
// emissions reduction, renewable degree, economic factor, security of supply and
// sizing adequacy.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "hres/demand.hpp"
#include "hres/dispatch.hpp"
#include "hres/error.hpp"

namespace hres {

/// gCO2/kWh per source.
struct EmissivityTable {
    double pv = 40.0;
    double wind = 20.0;
    double diesel = 600.0;
    double grid = 318.1;
    double grid_renewable_fraction = 0.271;

    void validate() const {
        detail::require(pv >= 0.0 && wind >= 0.0 && diesel >= 0.0 && grid >= 0.0, "emissivities must be non-negative");
        detail::require(detail::in_unit_interval(grid_renewable_fraction), "grid renewable fraction must lie in [0,1]");
    }
};

enum class BatteryReference { kDailyDemand, kAnnualDemand };

/// Security coefficients per source.
struct ReliabilityTable {
    double pv = 0.198;
    double wind = 0.216;
    double diesel = 0.857;
    double grid = 0.98;
    double battery = 0.7;
    BatteryReference battery_reference = BatteryReference::kDailyDemand;

    void validate() const {
        for (double d : {pv, wind, diesel, grid, battery})
            detail::require(detail::in_unit_interval(d), "security coefficients must lie in [0,1]");
    }
};

struct CriteriaScores {
    double emr = 0.0;
    double reg = 0.0;
    double ecf = 0.0;
    double ss = 0.0;
    double esa = 0.0;

    std::array<double, 5> as_array() const { return {emr, reg, ecf, ss, esa}; }
};

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

/// Σ_j E_j·g_j over everything generated or imported, in grams.
inline double hres_emissions_g(const EnergyLedger& L, const EmissivityTable& em) {
    return L.pv_generated_kwh * em.pv + L.wind_generated_kwh * em.wind + L.grid_import_kwh * em.grid +
           L.diesel_kwh * em.diesel;
}

/// Relative emission cut against the grid alone serving the same energy.
inline double emissions_reduction(const EnergyLedger& L, const EmissivityTable& em) {
    detail::require(L.demand_kwh > 0.0, "emissions reduction needs a positive demand");
    const double reference = L.served_kwh() * em.grid;
    detail::require(reference > 0.0, "emissions reduction needs served energy and a positive grid emissivity");
    return clamp01((reference - hres_emissions_g(L, em)) / reference);
}

inline double renewable_degree(const EnergyLedger& L, const EmissivityTable& em) {
    const double total = L.generation_kwh();
    detail::require(total > 0.0, "renewable degree needs positive generation");
    return clamp01((L.pv_generated_kwh + L.wind_generated_kwh + em.grid_renewable_fraction * L.grid_import_kwh) / total);
}

/// Discounted costs over discounted energy, both indexed by year from 0.
inline double levelized_cost(const std::vector<double>& cost_by_year, const std::vector<double>& energy_by_year,
                             double rate) {
    detail::require(rate >= 0.0 && rate < 1.0, "discount rate must lie in [0,1)");
    const double energy = present_value(energy_by_year, rate);
    detail::require(energy > 0.0, "levelized cost needs positive discounted energy");
    return present_value(cost_by_year, rate) / energy;
}

/// Lifetime cost per kWh delivered to the station. Exports are not credited here.
inline double lcoe(const Configuration& cfg, const EnergyLedger& L, const EconParams& econ) {
    const auto costs = yearly_costs(cost_stack(cfg, L, econ), econ.lifetime_years, false);
    std::vector<double> energy(costs.size(), L.served_kwh());
    energy[0] = 0.0;
    return levelized_cost(costs, energy, econ.discount_rate);
}

/// Levelized cost of buying every kWh from the grid.
inline double grid_reference_lcoe(const EconParams& econ) { return econ.grid_price_per_kwh; }

inline double economic_factor(double lcoe_hres, double lcoe_grid) {
    detail::require(lcoe_hres > 0.0, "LCOE must be positive");
    return std::min(1.0, lcoe_grid / lcoe_hres);
}

/// Individual availability factors f_j of the sources present in `cfg`.
inline std::vector<double> availability_factors(const Configuration& cfg, const EnergyLedger& L,
                                                const ReliabilityTable& rel, double peak_kw) {
    std::vector<double> f;
    const double annual = L.demand_kwh;
    if (cfg.pv_kw > 0.0) f.push_back(std::min(1.0, annual > 0.0 ? L.pv_generated_kwh / annual : 1.0) * rel.pv);
    if (cfg.wind_kw > 0.0) f.push_back(std::min(1.0, annual > 0.0 ? L.wind_generated_kwh / annual : 1.0) * rel.wind);
    if (cfg.grid_connected) f.push_back(std::min(1.0, cfg.grid_limit_kw / peak_kw) * rel.grid);
    if (cfg.diesel_kw > 0.0) f.push_back(std::min(1.0, cfg.diesel_kw / peak_kw) * rel.diesel);
    if (cfg.battery_kwh > 0.0) {
        double reference = annual;
        if (rel.battery_reference == BatteryReference::kDailyDemand)
            reference = annual * kHoursPerDay / (static_cast<double>(L.steps) * L.step_hours);
        f.push_back(std::min(1.0, reference > 0.0 ? cfg.battery_kwh / reference : 1.0) * rel.battery);
    }
    return f;
}

/// Sources combined as parallel elements: SS = 1 − Π(1 − f_j).
inline double combine_security(const std::vector<double>& factors) {
    double miss = 1.0;
    for (double f : factors) miss *= 1.0 - clamp01(f);
    return factors.empty() ? 0.0 : clamp01(1.0 - miss);
}

inline double security_of_supply(const Configuration& cfg, const EnergyLedger& L, const ReliabilityTable& rel,
                                 const DemandCurve& demand) {
    const double peak = demand.peak_kw();
    detail::require(peak > 0.0, "security of supply needs a positive peak demand");
    return combine_security(availability_factors(cfg, L, rel, peak));
}

inline double sizing_adequacy(const EnergyLedger& L) {
    const double total = L.generation_kwh();
    detail::require(total > 0.0, "sizing adequacy needs positive generation");
    return std::min(1.0, L.demand_kwh / total);
}

struct Assessment {
    CriteriaScores scores;
    double lcoe = 0.0;
    double npc = 0.0;
};

inline Assessment assess(const Configuration& cfg, const EnergyLedger& L, const DemandCurve& demand,
                         const EconParams& econ, const EmissivityTable& em, const ReliabilityTable& rel) {
    Assessment a;
    a.lcoe = lcoe(cfg, L, econ);
    a.npc = npc(cfg, L, econ);
    a.scores.emr = emissions_reduction(L, em);
    a.scores.reg = renewable_degree(L, em);
    a.scores.ecf = economic_factor(a.lcoe, grid_reference_lcoe(econ));
    a.scores.ss = security_of_supply(cfg, L, rel, demand);
    a.scores.esa = sizing_adequacy(L);
    return a;
}

}  // namespace hres
