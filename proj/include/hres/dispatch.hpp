#pragma once

// Energy balance of one configuration against a demand curve, step by step, and the
// cost stack (NPC, levelized cost) built from the resulting annual ledger.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "hres/csv.hpp"
#include "hres/demand.hpp"
#include "hres/error.hpp"
#include "hres/resources.hpp"

namespace hres {

/// One candidate system. A capacity of zero means the component is absent.
struct Configuration {
    double pv_kw = 0.0;
    double wind_kw = 0.0;
    bool grid_connected = false;
    double grid_limit_kw = 0.0;
    double diesel_kw = 0.0;
    double battery_kwh = 0.0;

    bool has_renewables() const { return pv_kw > 0.0 || wind_kw > 0.0; }

    void validate() const {
        detail::require(pv_kw >= 0.0 && wind_kw >= 0.0 && diesel_kw >= 0.0 && battery_kwh >= 0.0 && grid_limit_kw >= 0.0,
                        "capacities must be non-negative");
        detail::require(grid_connected == (grid_limit_kw > 0.0), "grid limit must be positive iff grid-connected");
    }

    /// Unique, human-readable key such as "PV500+W330+B4800". Used for tie-breaks.
    std::string label() const {
        std::string out;
        auto add = [&out](const char* tag, double v) {
            if (v <= 0.0) return;
            if (!out.empty()) out += '+';
            out += tag;
            out += csv::format_number(v);
        };
        add("PV", pv_kw);
        add("W", wind_kw);
        add("G", grid_connected ? grid_limit_kw : 0.0);
        add("D", diesel_kw);
        add("B", battery_kwh);
        return out.empty() ? "none" : out;
    }

    /// Technology category in the style "Ren + grid + bat".
    std::string category() const {
        std::string out = has_renewables() ? "Ren" : "";
        auto add = [&out](bool on, const char* tag) {
            if (!on) return;
            out += out.empty() ? tag : std::string(" + ") + tag;
        };
        add(grid_connected, "grid");
        add(diesel_kw > 0.0, "gen");
        add(battery_kwh > 0.0, "bat");
        if (out == "grid") return "Grid";
        return out.empty() ? "None" : out;
    }

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct BatteryParams {
    double capacity_kwh = 0.0;
    double soc_min = 0.3;
    double soc_max = 1.0;
    double roundtrip_efficiency = 0.85;
    double max_c_rate = 0.5;  ///< 1/h
    double initial_soc = 1.0;

    BatteryParams sized(double kwh) const {
        BatteryParams b = *this;
        b.capacity_kwh = kwh;
        return b;
    }

    double one_way_efficiency() const { return std::sqrt(roundtrip_efficiency); }

    void validate() const {
        detail::require(capacity_kwh >= 0.0, "battery capacity must be non-negative");
        detail::require(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0, "need 0 <= soc_min < soc_max <= 1");
        detail::require(roundtrip_efficiency > 0.0 && roundtrip_efficiency <= 1.0, "round-trip efficiency must lie in (0,1]");
        detail::require(max_c_rate > 0.0, "C-rate must be positive");
        detail::require(initial_soc >= soc_min && initial_soc <= soc_max, "initial SOC must lie in [soc_min, soc_max]");
    }
};

struct EconParams {
    double pv_investment_per_kw = 1200.0;
    double pv_om_per_kw_year = 40.0;
    double wind_investment_per_kw = 2020.0;
    double wind_om_per_kw_year = 60.0;
    double diesel_investment_per_kw = 380.0;
    double diesel_om_per_hour = 1.5;
    double fuel_price_per_l = 1.05;
    double battery_unit_cost = 950.0;
    double battery_unit_om_per_year = 10.0;
    double battery_unit_kwh = 6.0;
    double battery_unit_lifetime_throughput_kwh = 5400.0;  ///< discharged energy before replacement
    int battery_replacement_year = 12;
    double grid_price_per_kwh = 0.15;
    double export_price_per_kwh = 0.15;
    int lifetime_years = 25;
    double discount_rate = 0.08;

    void validate() const {
        detail::require(lifetime_years > 0, "project lifetime must be positive");
        detail::require(discount_rate >= 0.0 && discount_rate < 1.0, "discount rate must lie in [0,1)");
        for (double c : {pv_investment_per_kw, pv_om_per_kw_year, wind_investment_per_kw, wind_om_per_kw_year,
                         diesel_investment_per_kw, diesel_om_per_hour, fuel_price_per_l, battery_unit_cost,
                         battery_unit_om_per_year, grid_price_per_kwh, export_price_per_kwh})
            detail::require(c >= 0.0, "costs must be non-negative");
        detail::require(battery_unit_kwh > 0.0, "battery unit size must be positive");
        detail::require(battery_unit_lifetime_throughput_kwh > 0.0, "battery lifetime throughput must be positive");
        detail::require(battery_replacement_year > 0, "battery replacement year must be positive");
    }

    /// Σ_{t=1..n} (1+r)^-t
    double annuity_factor() const {
        double a = 0.0;
        for (int t = 1; t <= lifetime_years; ++t) a += std::pow(1.0 + discount_rate, -t);
        return a;
    }
};

enum class Dispatchable { kBattery, kGrid, kDiesel };

inline const char* to_string(Dispatchable d) {
    switch (d) {
        case Dispatchable::kBattery: return "battery";
        case Dispatchable::kGrid: return "grid";
        case Dispatchable::kDiesel: return "diesel";
    }
    return "?";
}

/// How deficits are covered. With cycle charging, the generator runs at rated output
/// and its excess charges the battery; a latch then keeps the battery in reserve
/// until the SOC climbs back to the setpoint.
struct DispatchPolicy {
    std::vector<Dispatchable> deficit_order{Dispatchable::kBattery, Dispatchable::kGrid, Dispatchable::kDiesel};
    bool cycle_charging = true;
    double setpoint_soc = 0.6;
    double diesel_fuel_l_per_kwh = 0.3;

    void validate() const {
        detail::require(deficit_order.size() == 3, "deficit order must list battery, grid and diesel once each");
        for (auto d : {Dispatchable::kBattery, Dispatchable::kGrid, Dispatchable::kDiesel})
            detail::require(std::count(deficit_order.begin(), deficit_order.end(), d) == 1,
                            "deficit order must list battery, grid and diesel once each");
        detail::require(detail::in_unit_interval(setpoint_soc), "setpoint SOC must lie in [0,1]");
        detail::require(diesel_fuel_l_per_kwh >= 0.0, "specific fuel consumption must be non-negative");
    }
};

/// Cost of cycling one kWh through the battery, from the unit price and its lifetime throughput.
inline double battery_wear_cost(const EconParams& econ) {
    return econ.battery_unit_cost / econ.battery_unit_lifetime_throughput_kwh;
}

/// Marginal cost of one diesel kWh at rated output.
inline double diesel_marginal_cost(const EconParams& econ, double diesel_kw, double l_per_kwh) {
    if (diesel_kw <= 0.0) return 0.0;
    return econ.fuel_price_per_l * l_per_kwh + econ.diesel_om_per_hour / diesel_kw;
}

/// Deficit order by ascending marginal cost; absent sources go last, ties keep battery, grid, diesel.
inline DispatchPolicy merit_order_policy(const Configuration& cfg, const EconParams& econ, DispatchPolicy base = {}) {
    struct Entry { Dispatchable d; double cost; };
    constexpr double absent = std::numeric_limits<double>::infinity();
    std::vector<Entry> e{{Dispatchable::kBattery, cfg.battery_kwh > 0.0 ? battery_wear_cost(econ) : absent},
                         {Dispatchable::kGrid, cfg.grid_connected ? econ.grid_price_per_kwh : absent},
                         {Dispatchable::kDiesel, cfg.diesel_kw > 0.0 ? diesel_marginal_cost(econ, cfg.diesel_kw, base.diesel_fuel_l_per_kwh) : absent}};
    std::stable_sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) { return a.cost < b.cost; });
    base.deficit_order.clear();
    for (const auto& x : e) base.deficit_order.push_back(x.d);
    return base;
}

// ---------------------------------------------------------------------------
// Step kernel

struct StepInput {
    double demand_kw = 0.0;
    double pv_kw = 0.0;
    double wind_kw = 0.0;
};

/// Mean powers over one step (kW). Multiply by the step length for energy.
struct StepFlows {
    double demand = 0.0;
    double pv = 0.0;
    double wind = 0.0;
    double renewable_to_load = 0.0;
    double battery_charge = 0.0;
    double battery_discharge = 0.0;
    double grid_import = 0.0;
    double grid_export = 0.0;
    double diesel = 0.0;
    double curtailed = 0.0;
    double unmet = 0.0;
    double soc_before = 0.0;
    double soc_after = 0.0;
    bool diesel_on = false;

    double supplied() const { return demand - unmet; }

    /// supply + discharge + unmet − demand − charge − export − curtailment
    double residual_kw() const {
        return pv + wind + grid_import + diesel + battery_discharge + unmet - demand - battery_charge - grid_export - curtailed;
    }
};

class DispatchKernel {
public:
    DispatchKernel(Configuration cfg, BatteryParams bat, DispatchPolicy policy)
        : cfg_(std::move(cfg)), bat_(bat), policy_(std::move(policy)), soc_(bat.initial_soc) {
        cfg_.validate();
        bat_.validate();
        policy_.validate();
        detail::require(std::abs(bat_.capacity_kwh - cfg_.battery_kwh) <= 1e-9 * std::max(1.0, cfg_.battery_kwh),
                        "battery parameters do not match the configured capacity");
        eta_ = bat_.one_way_efficiency();
    }

    double soc() const { return soc_; }
    bool latched() const { return latch_; }
    const Configuration& config() const { return cfg_; }

    StepFlows step(const StepInput& in, double dt) {
        detail::require(dt > 0.0, "time step must be positive");
        detail::require(in.demand_kw >= 0.0 && in.pv_kw >= 0.0 && in.wind_kw >= 0.0, "step inputs must be non-negative");
        StepFlows f;
        f.demand = in.demand_kw;
        f.pv = in.pv_kw;
        f.wind = in.wind_kw;
        f.soc_before = soc_;
        dis_used_ = ch_used_ = 0.0;

        const double renewable = in.pv_kw + in.wind_kw;
        f.renewable_to_load = std::min(in.demand_kw, renewable);
        double deficit = in.demand_kw - f.renewable_to_load;
        double surplus = renewable - f.renewable_to_load;

        if (surplus > 0.0) {
            const double ch = charge(surplus, dt);
            f.battery_charge += ch;
            surplus -= ch;
            if (cfg_.grid_connected) {
                f.grid_export = std::min(surplus, cfg_.grid_limit_kw);
                surplus -= f.grid_export;
            }
            f.curtailed += surplus;
        }

        if (deficit > 0.0) {
            const auto& order = policy_.deficit_order;
            const auto pos = [&order](Dispatchable d) { return std::find(order.begin(), order.end(), d) - order.begin(); };
            const bool diesel_later = cfg_.diesel_kw > 0.0 && policy_.cycle_charging &&
                                      pos(Dispatchable::kDiesel) > pos(Dispatchable::kBattery);
            for (Dispatchable d : order) {
                switch (d) {
                    case Dispatchable::kGrid:
                        if (cfg_.grid_connected && deficit > 0.0) {
                            f.grid_import = std::min(deficit, cfg_.grid_limit_kw);
                            deficit -= f.grid_import;
                        }
                        break;
                    case Dispatchable::kBattery:
                        if (cfg_.battery_kwh > 0.0 && deficit > 0.0) {
                            const double avail = discharge_available(dt);
                            if (!diesel_later || (!latch_ && avail >= deficit)) {
                                const double dis = discharge(deficit, dt);
                                f.battery_discharge += dis;
                                deficit -= dis;
                            }
                        }
                        break;
                    case Dispatchable::kDiesel:
                        if (cfg_.diesel_kw > 0.0 && (deficit > 0.0 || (latch_ && policy_.cycle_charging))) {
                            const double out = policy_.cycle_charging ? cfg_.diesel_kw : std::min(cfg_.diesel_kw, deficit);
                            if (out <= 0.0) break;
                            f.diesel = out;
                            f.diesel_on = true;
                            const double served = std::min(out, deficit);
                            deficit -= served;
                            double excess = out - served;
                            if (deficit > 0.0 && cfg_.battery_kwh > 0.0) {
                                const double dis = discharge(deficit, dt);
                                f.battery_discharge += dis;
                                deficit -= dis;
                            }
                            if (excess > 0.0) {
                                const double ch = charge(excess, dt);
                                f.battery_charge += ch;
                                excess -= ch;
                            }
                            f.curtailed += excess;
                            if (cfg_.battery_kwh > 0.0 && policy_.cycle_charging) latch_ = true;
                        }
                        break;
                }
            }
            f.unmet = std::max(0.0, deficit);
        }

        if (latch_ && soc_ >= policy_.setpoint_soc - 1e-12) latch_ = false;
        f.soc_after = soc_;
        return f;
    }

private:
    double charge_acceptance(double dt) const {
        if (cfg_.battery_kwh <= 0.0) return 0.0;
        const double headroom = (bat_.soc_max - soc_) * cfg_.battery_kwh / (eta_ * dt);
        return std::max(0.0, std::min(bat_.max_c_rate * cfg_.battery_kwh - ch_used_, headroom));
    }

    double discharge_available(double dt) const {
        if (cfg_.battery_kwh <= 0.0) return 0.0;
        const double stored = (soc_ - bat_.soc_min) * cfg_.battery_kwh * eta_ / dt;
        return std::max(0.0, std::min(bat_.max_c_rate * cfg_.battery_kwh - dis_used_, stored));
    }

    double charge(double offered_kw, double dt) {
        const double p = std::min(offered_kw, charge_acceptance(dt));
        if (p <= 0.0) return 0.0;
        soc_ = std::min(bat_.soc_max, soc_ + eta_ * p * dt / cfg_.battery_kwh);
        ch_used_ += p;
        return p;
    }

    double discharge(double wanted_kw, double dt) {
        const double p = std::min(wanted_kw, discharge_available(dt));
        if (p <= 0.0) return 0.0;
        soc_ = std::max(bat_.soc_min, soc_ - p * dt / (eta_ * cfg_.battery_kwh));
        dis_used_ += p;
        return p;
    }

    Configuration cfg_;
    BatteryParams bat_;
    DispatchPolicy policy_;
    double eta_ = 1.0;
    double soc_ = 0.0;
    bool latch_ = false;
    double dis_used_ = 0.0;
    double ch_used_ = 0.0;
};

// ---------------------------------------------------------------------------
// Annual simulation

/// PV and wind output sized for one configuration.
struct SourceProfiles {
    GenerationProfile pv;
    GenerationProfile wind;

    /// Rescales per-kW (or any-size) profiles to the configuration's capacities.
    static SourceProfiles for_config(const GenerationProfile& pv_shape, const GenerationProfile& wind_shape,
                                     const Configuration& cfg) {
        return {pv_shape.rescaled(cfg.pv_kw), wind_shape.rescaled(cfg.wind_kw)};
    }
};

struct EnergyLedger {
    double step_hours = 1.0;
    std::size_t steps = 0;
    double demand_kwh = 0.0;
    double pv_generated_kwh = 0.0;
    double wind_generated_kwh = 0.0;
    double pv_to_load_kwh = 0.0;
    double wind_to_load_kwh = 0.0;
    double grid_import_kwh = 0.0;
    double grid_export_kwh = 0.0;
    double diesel_kwh = 0.0;
    double diesel_hours = 0.0;
    double diesel_fuel_l = 0.0;
    double battery_charge_kwh = 0.0;
    double battery_throughput_kwh = 0.0;  ///< discharged energy
    double unmet_kwh = 0.0;
    double curtailed_kwh = 0.0;
    double max_residual_kwh = 0.0;
    double soc_min_seen = 0.0;
    double soc_max_seen = 0.0;
    std::vector<double> soc;         ///< end-of-step SOC, one per step (empty without a battery)
    std::vector<StepFlows> trace;    ///< filled only on request

    /// Total generation E_HRES: every kWh produced or imported.
    double generation_kwh() const { return pv_generated_kwh + wind_generated_kwh + grid_import_kwh + diesel_kwh; }
    double served_kwh() const { return demand_kwh - unmet_kwh; }
    double shortage_fraction() const { return demand_kwh > 0.0 ? unmet_kwh / demand_kwh : 0.0; }
};

inline constexpr double kBalanceTolerance = 1e-6;  ///< kWh per step

inline EnergyLedger simulate_year(const Configuration& cfg, const DemandCurve& demand, const SourceProfiles& profiles,
                                  const BatteryParams& bat, const DispatchPolicy& policy = {}, bool record_trace = false) {
    cfg.validate();
    const std::size_t n = demand.size();
    detail::require(n > 0, "demand curve is empty");
    detail::require(profiles.pv.kw.size() == n && profiles.wind.kw.size() == n,
                    "generation profiles must have the same length as the demand curve");
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    detail::require(same(profiles.pv.nameplate_kw, cfg.pv_kw), "PV profile nameplate does not match the configuration");
    detail::require(same(profiles.wind.nameplate_kw, cfg.wind_kw), "wind profile nameplate does not match the configuration");

    DispatchKernel kernel(cfg, bat, policy);
    const double dt = demand.step_hours;
    EnergyLedger L;
    L.step_hours = dt;
    L.steps = n;
    L.soc_min_seen = L.soc_max_seen = kernel.soc();
    if (cfg.battery_kwh > 0.0) L.soc.reserve(n);
    if (record_trace) L.trace.reserve(n);

    for (std::size_t t = 0; t < n; ++t) {
        const StepFlows f = kernel.step({demand.kw[t], profiles.pv.kw[t], profiles.wind.kw[t]}, dt);
        const double residual = std::abs(f.residual_kw()) * dt;
        L.max_residual_kwh = std::max(L.max_residual_kwh, residual);
        if (residual >= kBalanceTolerance) throw Error("energy balance violated at step " + std::to_string(t));

        L.demand_kwh += f.demand * dt;
        L.pv_generated_kwh += f.pv * dt;
        L.wind_generated_kwh += f.wind * dt;
        if (f.pv + f.wind > 0.0) {
            L.pv_to_load_kwh += f.renewable_to_load * f.pv / (f.pv + f.wind) * dt;
            L.wind_to_load_kwh += f.renewable_to_load * f.wind / (f.pv + f.wind) * dt;
        }
        L.grid_import_kwh += f.grid_import * dt;
        L.grid_export_kwh += f.grid_export * dt;
        L.diesel_kwh += f.diesel * dt;
        if (f.diesel_on) L.diesel_hours += dt;
        L.battery_charge_kwh += f.battery_charge * dt;
        L.battery_throughput_kwh += f.battery_discharge * dt;
        L.unmet_kwh += f.unmet * dt;
        L.curtailed_kwh += f.curtailed * dt;
        L.soc_min_seen = std::min(L.soc_min_seen, f.soc_after);
        L.soc_max_seen = std::max(L.soc_max_seen, f.soc_after);
        if (cfg.battery_kwh > 0.0) L.soc.push_back(f.soc_after);
        if (record_trace) L.trace.push_back(f);
    }
    L.diesel_fuel_l = L.diesel_kwh * policy.diesel_fuel_l_per_kwh;
    return L;
}

/// True iff unmet load is at most `max_shortage` of demand (inclusive).
inline bool feasible(const EnergyLedger& ledger, double max_shortage = 0.10) {
    if (ledger.demand_kwh <= 0.0) return true;
    return ledger.unmet_kwh <= max_shortage * ledger.demand_kwh * (1.0 + 1e-12);
}

// ---------------------------------------------------------------------------
// Economics

/// Yearly cash flows of one configuration. Investment falls at t = 0,
/// recurring items every year 1..n, the battery replacement (if any) once.
struct CostStack {
    double investment = 0.0;
    double annual_om = 0.0;
    double annual_fuel = 0.0;
    double annual_grid_purchase = 0.0;
    double annual_export_credit = 0.0;
    double replacement = 0.0;
    int replacement_year = 0;  ///< 0 = none

    double battery_units = 0.0;
};

inline CostStack cost_stack(const Configuration& cfg, const EnergyLedger& ledger, const EconParams& econ) {
    econ.validate();
    CostStack c;
    c.battery_units = cfg.battery_kwh / econ.battery_unit_kwh;
    c.investment = econ.pv_investment_per_kw * cfg.pv_kw + econ.wind_investment_per_kw * cfg.wind_kw +
                   econ.diesel_investment_per_kw * cfg.diesel_kw + econ.battery_unit_cost * c.battery_units;
    c.annual_om = econ.pv_om_per_kw_year * cfg.pv_kw + econ.wind_om_per_kw_year * cfg.wind_kw +
                  econ.diesel_om_per_hour * ledger.diesel_hours + econ.battery_unit_om_per_year * c.battery_units;
    c.annual_fuel = econ.fuel_price_per_l * ledger.diesel_fuel_l;
    c.annual_grid_purchase = econ.grid_price_per_kwh * ledger.grid_import_kwh;
    c.annual_export_credit = econ.export_price_per_kwh * ledger.grid_export_kwh;
    const bool worn_out = econ.lifetime_years * ledger.battery_throughput_kwh >
                          c.battery_units * econ.battery_unit_lifetime_throughput_kwh;
    if (cfg.battery_kwh > 0.0 && worn_out && econ.battery_replacement_year < econ.lifetime_years) {
        c.replacement = econ.battery_unit_cost * c.battery_units;
        c.replacement_year = econ.battery_replacement_year;
    }
    return c;
}

/// Year-indexed costs (index 0 = investment year), optionally net of export credit.
inline std::vector<double> yearly_costs(const CostStack& c, int lifetime_years, bool credit_exports) {
    std::vector<double> y(static_cast<std::size_t>(lifetime_years) + 1, 0.0);
    y[0] = c.investment;
    const double recurring =
        c.annual_om + c.annual_fuel + c.annual_grid_purchase - (credit_exports ? c.annual_export_credit : 0.0);
    for (int t = 1; t <= lifetime_years; ++t) y[t] = recurring;
    if (c.replacement_year > 0 && c.replacement_year <= lifetime_years) y[c.replacement_year] += c.replacement;
    return y;
}

inline double present_value(const std::vector<double>& by_year, double rate) {
    double pv = 0.0;
    for (std::size_t t = 0; t < by_year.size(); ++t) pv += by_year[t] / std::pow(1.0 + rate, static_cast<double>(t));
    return pv;
}

/// Net present cost, exports credited at the export price.
inline double npc(const Configuration& cfg, const EnergyLedger& ledger, const EconParams& econ) {
    const auto c = cost_stack(cfg, ledger, econ);
    return present_value(yearly_costs(c, econ.lifetime_years, true), econ.discount_rate);
}

// ---------------------------------------------------------------------------
// Export

inline void write_ledger_csv(std::ostream& os, const EnergyLedger& L) {
    os << "step,demand_kw,pv_kw,wind_kw,renewable_to_load_kw,battery_charge_kw,battery_discharge_kw,"
          "grid_import_kw,grid_export_kw,diesel_kw,curtailed_kw,unmet_kw,soc\n";
    for (std::size_t t = 0; t < L.trace.size(); ++t) {
        const auto& f = L.trace[t];
        os << t;
        for (double v : {f.demand, f.pv, f.wind, f.renewable_to_load, f.battery_charge, f.battery_discharge,
                         f.grid_import, f.grid_export, f.diesel, f.curtailed, f.unmet, f.soc_after})
            os << ',' << csv::format_number(v);
        os << '\n';
    }
}

}  // namespace hres
