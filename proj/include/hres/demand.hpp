#pragma once

// Charging-station demand model: per-class recharge power times the number of
// vehicles of that class stopping to recharge in each hour.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hres/csv.hpp"
#include "hres/error.hpp"

namespace hres {

enum class EvClassId { kBevCar, kPhevCar, kBevMoto };

inline std::string_view to_string(EvClassId id) {
    switch (id) {
        case EvClassId::kBevCar: return "BEV_CAR";
        case EvClassId::kPhevCar: return "PHEV_CAR";
        case EvClassId::kBevMoto: return "BEV_MOTO";
    }
    return "?";
}

inline EvClassId ev_class_from_string(std::string_view s) {
    if (s == "BEV_CAR") return EvClassId::kBevCar;
    if (s == "PHEV_CAR") return EvClassId::kPhevCar;
    if (s == "BEV_MOTO") return EvClassId::kBevMoto;
    throw InvalidParameter("unknown EV class '" + std::string(s) + "'");
}

/// Recharge parameters of one vehicle type.
struct EvClass {
    EvClassId id = EvClassId::kBevCar;
    double battery_kwh = 0.0;     ///< usable pack capacity
    double soc_max = 1.0;         ///< state of charge at the end of the recharge
    double soc_init = 0.0;        ///< state of charge on arrival
    double recharge_minutes = 0.0;
    double penetration = 0.0;     ///< electric share of the class's fleet segment
    double recharge_rate = 0.0;   ///< share of passing EVs that stop to recharge
    double fleet_share = 1.0;     ///< share of total traffic in the class's segment (cars, motorcycles)

    void validate() const {
        using detail::require;
        require(battery_kwh > 0.0, "EV battery capacity must be positive");
        require(recharge_minutes > 0.0, "EV recharge duration must be positive");
        require(soc_init >= 0.0 && soc_init <= soc_max && soc_max <= 1.0,
                "EV SOC window must satisfy 0 <= soc_init <= soc_max <= 1");
        require(detail::in_unit_interval(penetration) && detail::in_unit_interval(recharge_rate) &&
                    detail::in_unit_interval(fleet_share),
                "EV penetration, recharge rate and fleet share must lie in [0,1]");
    }
};

/// Hourly count of vehicles passing the station.
struct TrafficProfile {
    std::vector<double> vehicles_per_hour;

    void validate() const {
        detail::require(!vehicles_per_hour.empty(), "traffic profile is empty");
        for (double n : vehicles_per_hour)
            detail::require(n >= 0.0 && std::isfinite(n), "traffic counts must be finite and non-negative");
    }
};

/// Station power demand sampled at a fixed step.
struct DemandCurve {
    std::vector<double> kw;
    double step_hours = 1.0;

    std::size_t size() const { return kw.size(); }
    double peak_kw() const { return kw.empty() ? 0.0 : *std::max_element(kw.begin(), kw.end()); }
    double energy_kwh() const { return std::accumulate(kw.begin(), kw.end(), 0.0) * step_hours; }

    /// Repeats the curve `times` times end to end.
    DemandCurve tiled(std::size_t times) const {
        DemandCurve out{{}, step_hours};
        out.kw.reserve(kw.size() * times);
        for (std::size_t i = 0; i < times; ++i) out.kw.insert(out.kw.end(), kw.begin(), kw.end());
        return out;
    }
};

/// Average charging power of one vehicle while it recharges, kW.
inline double ev_recharge_power(const EvClass& cls) {
    detail::require(cls.recharge_minutes > 0.0, "EV recharge duration must be positive");
    cls.validate();
    return cls.battery_kwh * (cls.soc_max - cls.soc_init) / (cls.recharge_minutes / 60.0);
}

/// Vehicles of `cls` recharging at the station in an hour with `passing` vehicles on the road.
inline double vehicles_recharging(double passing, const EvClass& cls) {
    detail::require(passing >= 0.0, "vehicle count must be non-negative");
    return passing * cls.fleet_share * cls.penetration * cls.recharge_rate;
}

/// Demand contributed by a single class.
inline DemandCurve class_demand_curve(const TrafficProfile& traffic, const EvClass& cls) {
    traffic.validate();
    const double p_ev = ev_recharge_power(cls);
    DemandCurve out;
    out.kw.reserve(traffic.vehicles_per_hour.size());
    for (double n : traffic.vehicles_per_hour) out.kw.push_back(vehicles_recharging(n, cls) * p_ev);
    return out;
}

inline DemandCurve evcs_demand_curve(const TrafficProfile& traffic, std::span<const EvClass> classes) {
    detail::require(!classes.empty(), "at least one EV class is required");
    traffic.validate();
    DemandCurve out;
    out.kw.assign(traffic.vehicles_per_hour.size(), 0.0);
    for (const auto& cls : classes) {
        const auto part = class_demand_curve(traffic, cls);
        for (std::size_t t = 0; t < out.kw.size(); ++t) out.kw[t] += part.kw[t];
    }
    return out;
}

/// Reads `hour,vehicles_per_hour` rows (header required). Hours must run 0..N-1 in order.
inline TrafficProfile read_traffic_csv(const std::string& path) {
    const auto table = csv::read_file(path, 2);
    TrafficProfile out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const double hour = csv::parse_number(row[0], i + 1);
        if (hour != static_cast<double>(i)) throw FormatError("traffic hours must run 0,1,2,... in order", i + 1);
        const double n = csv::parse_number(row[1], i + 1);
        if (n < 0.0) throw FormatError("negative vehicle count", i + 1);
        out.vehicles_per_hour.push_back(n);
    }
    if (out.vehicles_per_hour.empty()) throw FormatError("traffic file has no data rows");
    return out;
}

}  // namespace hres
