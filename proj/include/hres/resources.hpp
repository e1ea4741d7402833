#pragma once

// Hourly PV and wind output for a typical year, synthesized deterministically from
// monthly site averages, or loaded from a measured 8760-row profile.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "hres/csv.hpp"
#include "hres/error.hpp"

namespace hres {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kDaysPerYear = 365;
inline constexpr int kHoursPerYear = kHoursPerDay * kDaysPerYear;
inline constexpr std::array<int, 12> kDaysInMonth{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

/// Zero-based month of a zero-based day of the (non-leap) year.
inline int month_of_day(int day) {
    day = ((day % kDaysPerYear) + kDaysPerYear) % kDaysPerYear;
    int m = 0;
    while (day >= kDaysInMonth[m]) day -= kDaysInMonth[m++];
    return m;
}

inline int first_hour_of_month(int month) {
    int days = 0;
    for (int m = 0; m < month; ++m) days += kDaysInMonth[m];
    return days * kHoursPerDay;
}

/// Hourly power sequence of one generator.
struct GenerationProfile {
    std::vector<double> kw;
    double nameplate_kw = 0.0;

    double energy_kwh() const { return std::accumulate(kw.begin(), kw.end(), 0.0); }

    /// Annual energy per kW of nameplate (kWh/kW-year); zero for a zero-size unit.
    double equivalent_hours() const { return nameplate_kw > 0.0 ? energy_kwh() / nameplate_kw : 0.0; }

    /// Same shape at a different nameplate.
    GenerationProfile rescaled(double new_nameplate_kw) const {
        detail::require(new_nameplate_kw >= 0.0, "nameplate must be non-negative");
        GenerationProfile out{std::vector<double>(kw.size(), 0.0), new_nameplate_kw};
        if (nameplate_kw > 0.0) {
            const double k = new_nameplate_kw / nameplate_kw;
            std::transform(kw.begin(), kw.end(), out.kw.begin(), [k](double p) { return p * k; });
        }
        return out;
    }

    void validate() const {
        detail::require(nameplate_kw >= 0.0, "nameplate must be non-negative");
        const double tol = 1e-9 * std::max(1.0, nameplate_kw);
        for (double p : kw) detail::require(p >= 0.0 && p <= nameplate_kw + tol, "profile value outside [0, nameplate]");
    }
};

// ---------------------------------------------------------------------------
// Solar

struct SolarResource {
    std::array<double, 12> daily_irradiation{};  ///< kWh/m2/day, monthly means
    std::array<double, 12> clearness_index{};
    double latitude_deg = 39.47;

    void validate() const {
        for (double h : daily_irradiation) detail::require(h >= 0.0, "irradiation must be non-negative");
        for (double k : clearness_index) detail::require(detail::in_unit_interval(k), "clearness index must lie in [0,1]");
        detail::require(std::abs(latitude_deg) < 90.0, "latitude must lie in (-90, 90)");
    }
};

/// Daylight duration in hours for a zero-based day of the year.
inline double day_length_hours(double latitude_deg, int day) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double declination = 23.45 * deg * std::sin(deg * 360.0 / 365.0 * (284.0 + day + 1));
    const double c = std::clamp(-std::tan(latitude_deg * deg) * std::tan(declination), -1.0, 1.0);
    return 2.0 * std::acos(c) / deg / 15.0;
}

/// Irradiation (kWh/m2) received on `day` between midnight and clock hour `hour`.
/// Daylight follows a half-sine centred on noon whose integral is the month's daily value.
inline double solar_cumulative(const SolarResource& res, int day, double hour) {
    const double h_day = res.daily_irradiation[month_of_day(day)];
    const double length = day_length_hours(res.latitude_deg, day);
    if (length <= 0.0 || h_day <= 0.0) return 0.0;
    const double sunrise = 12.0 - length / 2.0;
    const double x = std::clamp(hour, sunrise, sunrise + length);
    return h_day / 2.0 * (1.0 - std::cos(std::numbers::pi * (x - sunrise) / length));
}

/// Mean PV output (kW) over [t0, t0 + dt) with times in hours of the year; wraps at year end.
inline double solar_mean_power(const SolarResource& res, double pv_kw, double derate, double t0, double dt) {
    detail::require(dt > 0.0, "time step must be positive");
    double energy = 0.0, t = t0;
    const double end = t0 + dt;
    while (t < end - 1e-12) {
        const double day_start = std::floor(t / kHoursPerDay) * kHoursPerDay;
        const double seg_end = std::min(end, day_start + kHoursPerDay);
        const int day = static_cast<int>(day_start / kHoursPerDay);
        energy += solar_cumulative(res, day, seg_end - day_start) - solar_cumulative(res, day, t - day_start);
        t = seg_end;
    }
    return pv_kw * derate * energy / dt;
}

/// Hourly PV output for a typical year. Output per kW equals irradiance in kW/m2 times `derate`.
inline GenerationProfile synthesize_solar(const SolarResource& res, double pv_kw, double derate) {
    detail::require(pv_kw >= 0.0, "PV capacity must be non-negative");
    detail::require(derate >= 0.0 && derate <= 1.0, "PV derate must lie in [0,1]");
    res.validate();
    GenerationProfile out{std::vector<double>(kHoursPerYear, 0.0), pv_kw};
    if (pv_kw == 0.0) return out;
    for (int day = 0; day < kDaysPerYear; ++day) {
        double prev = 0.0;
        for (int h = 0; h < kHoursPerDay; ++h) {
            const double cum = solar_cumulative(res, day, h + 1.0);
            out.kw[day * kHoursPerDay + h] = pv_kw * derate * (cum - prev);
            prev = cum;
        }
    }
    return out;
}

/// Derate that makes the synthesized profile yield `target_hours` equivalent hours.
inline double calibrate_derate(const SolarResource& res, double target_hours) {
    const double raw = synthesize_solar(res, 1.0, 1.0).equivalent_hours();
    detail::require(raw > 0.0, "solar resource yields no energy");
    const double derate = target_hours / raw;
    detail::require(derate <= 1.0, "target equivalent hours exceed the available irradiation");
    return derate;
}

// ---------------------------------------------------------------------------
// Wind

/// Shape of the deterministic hourly wind series around the monthly mean.
struct WindVariability {
    double weibull_shape = 2.0;        ///< k of the marginal speed distribution
    double diurnal_amplitude = 0.2;    ///< relative swing of the daily cycle
    double diurnal_peak_hour = 15.0;
    std::vector<double> synoptic_periods_h{241.0, 151.0, 89.0, 53.0};
    std::vector<double> synoptic_phases_rad{0.3, 1.7, 2.9, 4.4};

    void validate() const {
        detail::require(weibull_shape > 0.0, "Weibull shape must be positive");
        detail::require(diurnal_amplitude >= 0.0 && diurnal_amplitude < 1.0, "diurnal amplitude must lie in [0,1)");
        detail::require(!synoptic_periods_h.empty() && synoptic_periods_h.size() == synoptic_phases_rad.size(),
                        "synoptic periods and phases must be non-empty and of equal length");
        for (double p : synoptic_periods_h) detail::require(p > 0.0, "synoptic periods must be positive");
    }
};

struct WindResource {
    std::array<double, 12> monthly_mean_speed{};  ///< m/s at measurement height
    double measurement_height_m = 18.0;
    double hub_height_m = 50.0;
    double shear_exponent = 0.14;
    WindVariability variability;

    void validate() const {
        for (double v : monthly_mean_speed) detail::require(v >= 0.0, "wind speeds must be non-negative");
        detail::require(measurement_height_m > 0.0 && hub_height_m > 0.0, "heights must be positive");
        variability.validate();
    }
};

/// Turbine output as a fraction of rated power: zero below cut-in and above cut-out,
/// a power-law rise between cut-in and rated speed, flat at 1 up to cut-out.
struct PowerCurve {
    double cut_in = 3.0;
    double rated = 11.0;
    double cut_out = 25.0;
    double exponent = 3.0;

    void validate() const {
        detail::require(cut_in >= 0.0, "cut-in speed must be non-negative");
        detail::require(cut_in < cut_out, "cut-in speed must be below cut-out speed");
        detail::require(cut_in < rated && rated <= cut_out, "rated speed must lie in (cut-in, cut-out]");
        detail::require(exponent > 0.0, "power-curve exponent must be positive");
    }

    double fraction(double speed) const {
        if (speed < cut_in || speed > cut_out) return 0.0;
        if (speed >= rated) return 1.0;
        const double lo = std::pow(cut_in, exponent);
        return (std::pow(speed, exponent) - lo) / (std::pow(rated, exponent) - lo);
    }
};

/// Hourly hub-height wind speed for a typical year. Each month's mean equals the
/// measured monthly mean scaled to hub height with the power-law shear profile.
inline std::vector<double> hub_wind_speeds(const WindResource& res) {
    res.validate();
    const auto& var = res.variability;
    const double n = static_cast<double>(var.synoptic_periods_h.size());
    const double gamma = std::tgamma(1.0 + 1.0 / var.weibull_shape);
    std::vector<double> raw(kHoursPerYear);
    for (int t = 0; t < kHoursPerYear; ++t) {
        double z = 0.0;
        for (std::size_t i = 0; i < var.synoptic_periods_h.size(); ++i)
            z += std::sin(2.0 * std::numbers::pi * t / var.synoptic_periods_h[i] + var.synoptic_phases_rad[i]);
        z *= std::sqrt(2.0 / n);  // unit variance
        const double u = std::clamp(0.5 * std::erfc(-z / std::numbers::sqrt2), 1e-9, 1.0 - 1e-9);
        const double weibull = std::pow(-std::log(1.0 - u), 1.0 / var.weibull_shape) / gamma;
        const double diurnal =
            1.0 + var.diurnal_amplitude * std::cos(2.0 * std::numbers::pi * ((t % kHoursPerDay) - var.diurnal_peak_hour) / 24.0);
        raw[t] = weibull * diurnal;
    }
    const double shear = std::pow(res.hub_height_m / res.measurement_height_m, res.shear_exponent);
    std::vector<double> out(kHoursPerYear);
    for (int m = 0; m < 12; ++m) {
        const int begin = first_hour_of_month(m), len = kDaysInMonth[m] * kHoursPerDay;
        double mean = 0.0;
        for (int t = begin; t < begin + len; ++t) mean += raw[t];
        mean /= len;
        for (int t = begin; t < begin + len; ++t) out[t] = raw[t] / mean * res.monthly_mean_speed[m] * shear;
    }
    return out;
}

inline GenerationProfile synthesize_wind(const WindResource& res, double turbine_kw, const PowerCurve& curve) {
    detail::require(turbine_kw >= 0.0, "turbine capacity must be non-negative");
    curve.validate();
    const auto speeds = hub_wind_speeds(res);
    GenerationProfile out{std::vector<double>(kHoursPerYear, 0.0), turbine_kw};
    for (int t = 0; t < kHoursPerYear; ++t) out.kw[t] = turbine_kw * curve.fraction(speeds[t]);
    return out;
}

/// Shear exponent that makes the synthesized turbine yield `target_hours` equivalent hours.
inline double calibrate_shear(WindResource res, const PowerCurve& curve, double target_hours, double lo = 0.0,
                              double hi = 1.5) {
    detail::require(res.hub_height_m > res.measurement_height_m, "shear calibration needs hub above measurement height");
    auto hours = [&](double alpha) {
        res.shear_exponent = alpha;
        return synthesize_wind(res, 1.0, curve).equivalent_hours();
    };
    detail::require(hours(lo) <= target_hours && hours(hi) >= target_hours, "target equivalent hours not bracketed");
    for (int i = 0; i < 80 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        (hours(mid) < target_hours ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Measured profiles

/// Reads `hour_of_year,power_kw` (header, 8760 rows) and checks it against `nameplate_kw`.
inline GenerationProfile load_profile_csv(const std::string& path, double nameplate_kw) {
    detail::require(nameplate_kw >= 0.0, "nameplate must be non-negative");
    const auto table = csv::read_file(path, 2);
    if (table.rows.size() != static_cast<std::size_t>(kHoursPerYear))
        throw FormatError(path + ": expected " + std::to_string(kHoursPerYear) + " rows, found " +
                          std::to_string(table.rows.size()));
    GenerationProfile out{std::vector<double>(kHoursPerYear), nameplate_kw};
    const double tol = 1e-9 * std::max(1.0, nameplate_kw);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const double hour = csv::parse_number(table.rows[i][0], i + 1);
        if (hour != static_cast<double>(i)) throw FormatError(path + ": hour_of_year out of sequence", i + 1);
        const double p = csv::parse_number(table.rows[i][1], i + 1);
        if (p < 0.0) throw FormatError(path + ": negative power", i + 1);
        if (p > nameplate_kw + tol) throw FormatError(path + ": power above nameplate", i + 1);
        out.kw[i] = p;
    }
    return out;
}

}  // namespace hres
