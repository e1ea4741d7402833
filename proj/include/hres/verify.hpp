#pragma once

// Lab-scale verification: a design is shrunk by a scale factor and run over one day at
// a fine time step through the dispatch kernel, checking the per-step power-loss rate
// and the battery SOC window.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hres/demand.hpp"
#include "hres/dispatch.hpp"
#include "hres/error.hpp"
#include "hres/mcdm.hpp"
#include "hres/resources.hpp"

namespace hres {

/// Full-scale power traces over the verification window.
struct DayTraces {
    double step_minutes = 1.0;
    double start_hour = 0.0;  ///< hour of year at the first step
    std::vector<double> demand_kw;
    std::vector<double> pv_kw;
    std::vector<double> wind_kw;
};

struct ScaledScenario {
    double sf = 1.0;
    Configuration config;  ///< capacities divided by sf
    DayTraces traces;      ///< powers divided by sf
};

struct VerificationLimits {
    double max_loss_rate = 0.05;
    double soc_min = 0.3;
    double soc_max = 1.0;

    void validate() const {
        detail::require(max_loss_rate > 0.0 && max_loss_rate < 1.0, "loss limit must lie in (0,1)");
        detail::require(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0, "need 0 <= soc_min < soc_max <= 1");
    }
};

/// Window placement and the high-frequency wind term.
struct VerificationDay {
    int day_of_year = 0;          ///< zero-based
    double start_hour = 9.0;      ///< clock hour of the first step
    int step_minutes = 1;
    double wind_fluctuation = 0.12;     ///< std-dev of the log speed multiplier
    double wind_correlation = 0.95;     ///< step-to-step AR(1) coefficient
    std::uint64_t seed = 42;

    void validate() const {
        detail::require(day_of_year >= 0 && day_of_year < kDaysPerYear, "day of year must lie in [0,365)");
        detail::require(start_hour >= 0.0 && start_hour < 24.0, "start hour must lie in [0,24)");
        detail::require(step_minutes > 0 && (24 * 60) % step_minutes == 0, "step must divide 24 h");
        detail::require(wind_fluctuation >= 0.0, "wind fluctuation must be non-negative");
        detail::require(wind_correlation >= 0.0 && wind_correlation < 1.0, "wind correlation must lie in [0,1)");
    }

    std::size_t steps() const { return static_cast<std::size_t>(24 * 60 / step_minutes); }
};

inline double wrap_hour(double t) { return std::fmod(std::fmod(t, kHoursPerYear) + kHoursPerYear, kHoursPerYear); }

/// Seeded multiplicative speed fluctuation with unit mean.
inline std::vector<double> wind_fluctuation_series(std::size_t n, double sigma, double rho, std::uint64_t seed) {
    std::vector<double> out(n, 1.0);
    if (sigma <= 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = sigma * normal(rng);
    const double innovation = sigma * std::sqrt(1.0 - rho * rho);
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) x = rho * x + innovation * normal(rng);
        out[k] = std::exp(x - 0.5 * sigma * sigma);
    }
    return out;
}

/// Demand at the fine step is the hourly value it falls in (hourly demand is a mean power).
inline std::vector<double> day_demand(const DemandCurve& demand, const VerificationDay& day) {
    detail::require(demand.size() > 0 && demand.step_hours == 1.0, "verification needs an hourly demand curve");
    const double dt = day.step_minutes / 60.0;
    std::vector<double> out(day.steps());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double t = wrap_hour(day.day_of_year * 24.0 + day.start_hour + (k + 0.5) * dt);
        out[k] = demand.kw[static_cast<std::size_t>(t) % demand.size()];
    }
    return out;
}

/// Traces synthesized from the site resources at the fine step.
inline DayTraces build_day_traces(const Configuration& cfg, const DemandCurve& demand, const SolarResource& solar,
                                  double derate, const WindResource& wind, const PowerCurve& curve,
                                  const VerificationDay& day) {
    day.validate();
    curve.validate();
    const double dt = day.step_minutes / 60.0;
    const std::size_t n = day.steps();
    DayTraces tr;
    tr.step_minutes = day.step_minutes;
    tr.start_hour = day.day_of_year * 24.0 + day.start_hour;
    tr.demand_kw = day_demand(demand, day);
    tr.pv_kw.resize(n);
    tr.wind_kw.resize(n);
    const auto speeds = hub_wind_speeds(wind);
    const auto fluct = wind_fluctuation_series(n, day.wind_fluctuation, day.wind_correlation, day.seed);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = wrap_hour(tr.start_hour + k * dt);
        tr.pv_kw[k] = cfg.pv_kw > 0.0 ? solar_mean_power(solar, cfg.pv_kw, derate, t, dt) : 0.0;
        const double mid = wrap_hour(t + dt / 2);
        const auto i = static_cast<std::size_t>(mid);
        const double frac = mid - static_cast<double>(i);
        const double v = speeds[i] + (speeds[(i + 1) % speeds.size()] - speeds[i]) * frac;
        tr.wind_kw[k] = cfg.wind_kw * curve.fraction(v * fluct[k]);
    }
    return tr;
}

/// Traces from hourly profiles (e.g. measured CSVs), held constant within each hour.
inline DayTraces build_day_traces(const Configuration& cfg, const DemandCurve& demand, const GenerationProfile& pv_shape,
                                  const GenerationProfile& wind_shape, const VerificationDay& day) {
    day.validate();
    const auto pv = pv_shape.rescaled(cfg.pv_kw), wind = wind_shape.rescaled(cfg.wind_kw);
    detail::require(pv.kw.size() == kHoursPerYear && wind.kw.size() == kHoursPerYear, "hourly profiles must cover a year");
    const double dt = day.step_minutes / 60.0;
    DayTraces tr;
    tr.step_minutes = day.step_minutes;
    tr.start_hour = day.day_of_year * 24.0 + day.start_hour;
    tr.demand_kw = day_demand(demand, day);
    for (std::size_t k = 0; k < day.steps(); ++k) {
        const auto h = static_cast<std::size_t>(wrap_hour(tr.start_hour + (k + 0.5) * dt));
        tr.pv_kw.push_back(pv.kw[h]);
        tr.wind_kw.push_back(wind.kw[h]);
    }
    return tr;
}

/// Divides demand and every capacity by sf = peak(demand)/p_lab.
inline ScaledScenario scale(const Configuration& cfg, const DayTraces& full, double peak_demand_kw, double p_lab_kw) {
    detail::require(p_lab_kw > 0.0, "lab power must be positive");
    detail::require(peak_demand_kw > 0.0, "peak demand must be positive");
    ScaledScenario sc;
    sc.sf = peak_demand_kw / p_lab_kw;
    const double k = 1.0 / sc.sf;
    sc.config = cfg;
    sc.config.pv_kw *= k;
    sc.config.wind_kw *= k;
    sc.config.grid_limit_kw *= k;
    sc.config.diesel_kw *= k;
    sc.config.battery_kwh *= k;
    sc.traces = full;
    for (auto* v : {&sc.traces.demand_kw, &sc.traces.pv_kw, &sc.traces.wind_kw})
        for (double& x : *v) x *= k;
    return sc;
}

inline ScaledScenario scale(const Configuration& cfg, const DemandCurve& demand, const DayTraces& full, double p_lab_kw) {
    return scale(cfg, full, demand.peak_kw(), p_lab_kw);
}

inline constexpr const char* kConditionPowerBalance = "power-balance";
inline constexpr const char* kConditionSocBounds = "soc-bounds";

struct VerificationReport {
    std::string design_label;
    int design_rank = 0;
    double sf = 1.0;
    double step_minutes = 1.0;
    bool has_battery = false;
    std::vector<double> loss_rate;  ///< NaN where the step was skipped (no demand, no supply)
    std::vector<StepFlows> flows;
    double max_loss_rate = 0.0;
    std::vector<double> soc;        ///< SOC after each step (empty without a battery)
    double soc_start = 0.0;
    double soc_end = 0.0;
    double soc_min = 0.0;
    double soc_max = 0.0;
    bool passed = true;
    std::string failed_condition;   ///< empty when passed
    std::optional<std::size_t> failed_step;
};

inline VerificationReport verify_run(const ScaledScenario& sc, const BatteryParams& bat, const VerificationLimits& limits,
                                     const DispatchPolicy& policy = {}) {
    limits.validate();
    const auto& tr = sc.traces;
    const std::size_t n = tr.demand_kw.size();
    detail::require(tr.step_minutes > 0.0, "time step must be positive");
    detail::require(std::abs(n * tr.step_minutes - 24.0 * 60.0) < 1e-9, "verification must cover 24 h at the given step");
    detail::require(tr.pv_kw.size() == n && tr.wind_kw.size() == n, "trace lengths differ");

    const bool has_battery = sc.config.battery_kwh > 0.0;
    DispatchKernel kernel(sc.config, bat.sized(sc.config.battery_kwh), policy);
    const double dt = tr.step_minutes / 60.0;

    VerificationReport r;
    r.sf = sc.sf;
    r.has_battery = has_battery;
    r.step_minutes = tr.step_minutes;
    r.soc_start = r.soc_end = r.soc_min = r.soc_max = kernel.soc();
    const double tol = 1e-9;
    auto fail = [&r](const char* cond, std::size_t k) {
        if (!r.passed) return;
        r.passed = false;
        r.failed_condition = cond;
        r.failed_step = k;
    };
    if (has_battery && (r.soc_start < limits.soc_min - tol || r.soc_start > limits.soc_max + tol))
        fail(kConditionSocBounds, 0);

    for (std::size_t k = 0; k < n; ++k) {
        const StepFlows f = kernel.step({tr.demand_kw[k], tr.pv_kw[k], tr.wind_kw[k]}, dt);
        if (std::abs(f.residual_kw()) * dt >= kBalanceTolerance) throw Error("energy balance violated at step " + std::to_string(k));
        r.flows.push_back(f);
        const double supplied = f.supplied();
        double loss = std::nan("");
        if (supplied > 0.0)
            loss = std::abs(supplied - f.demand) / supplied;
        else if (f.demand > 0.0)
            loss = 1.0;
        r.loss_rate.push_back(loss);
        if (!std::isnan(loss)) {
            r.max_loss_rate = std::max(r.max_loss_rate, loss);
            if (loss > limits.max_loss_rate + tol) fail(kConditionPowerBalance, k);
        }
        if (has_battery) {
            r.soc.push_back(f.soc_after);
            r.soc_min = std::min(r.soc_min, f.soc_after);
            r.soc_max = std::max(r.soc_max, f.soc_after);
            if (f.soc_after < limits.soc_min - tol || f.soc_after > limits.soc_max + tol) fail(kConditionSocBounds, k);
        }
    }
    r.soc_end = kernel.soc();
    return r;
}

struct CascadeResult {
    std::optional<std::size_t> passed;  ///< index into the ranked list
    std::vector<VerificationReport> reports;
};

/// Verifies designs in rank order and stops at the first pass.
inline CascadeResult verify_cascade(const std::vector<RankedDesign>& ranked,
                                    const std::function<VerificationReport(const RankedDesign&)>& run) {
    detail::require(!ranked.empty(), "nothing to verify");
    CascadeResult out;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        auto rep = run(ranked[i]);
        rep.design_rank = ranked[i].rank;
        if (rep.design_label.empty()) rep.design_label = ranked[i].design.label;
        const bool ok = rep.passed;
        out.reports.push_back(std::move(rep));
        if (ok) {
            out.passed = i;
            break;
        }
    }
    return out;
}

}  // namespace hres
