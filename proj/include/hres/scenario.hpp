#pragma once

// Scenario files: one JSON document holding every input of a design study.
// Relative file paths resolve against the scenario's own directory.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hres/criteria.hpp"
#include "hres/demand.hpp"
#include "hres/dispatch.hpp"
#include "hres/error.hpp"
#include "hres/mcdm.hpp"
#include "hres/predesign.hpp"
#include "hres/resources.hpp"
#include "hres/verify.hpp"

namespace hres {

using Json = nlohmann::json;

struct ProfileFile {
    std::filesystem::path path;
    double nameplate_kw = 0.0;
};

struct Scenario {
    std::string name;
    std::vector<EvClass> ev_classes;
    TrafficProfile traffic;
    int demand_days = kDaysPerYear;

    SolarResource solar;
    double pv_derate = 1.0;
    std::optional<ProfileFile> pv_profile;
    WindResource wind;
    PowerCurve power_curve;
    std::optional<ProfileFile> wind_profile;

    ComponentMenu menu;
    BatteryParams battery;
    DispatchPolicy policy;
    bool merit_order = true;
    EconParams econ;
    EmissivityTable emissivity;
    ReliabilityTable reliability;
    WeightVector weights;
    double max_shortage = 0.10;

    double p_lab_kw = 1.08;
    double verify_initial_soc = 0.4;
    VerificationLimits limits;
    VerificationDay day;

    std::string output_dir = "out";
    Json effective;  ///< document the scenario was built from, after overrides
};

namespace detail {

/// Typed access into a JSON object that reports failures with a dotted path.
class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }

    const Json& raw(const std::string& key) const {
        if (!has(key)) throw ValidationError(at(key), "missing field");
        return j_[key];
    }

    Reader child(const std::string& key) const { return Reader(raw(key), at(key)); }

    template <class T>
    T get(const std::string& key) const {
        try {
            return raw(key).template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ValidationError(at(key), "wrong type");
        }
    }

    template <class T>
    T get(const std::string& key, T fallback) const {
        return has(key) ? get<T>(key) : fallback;
    }

    std::vector<double> numbers(const std::string& key) const { return get<std::vector<double>>(key); }

    std::array<double, 12> monthly(const std::string& key) const {
        const auto v = numbers(key);
        if (v.size() != 12) throw ValidationError(at(key), "expected 12 monthly values");
        std::array<double, 12> out{};
        std::copy(v.begin(), v.end(), out.begin());
        return out;
    }

private:
    const Json& j_;
    std::string path_;
};

/// Runs `check` and relabels invariant failures with the field path.
template <class Fn>
void validate_at(const std::string& path, Fn&& check) {
    try {
        check();
    } catch (const InvalidParameter& e) {
        throw ValidationError(path, e.what());
    }
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p, const std::string& field) {
    std::filesystem::path out(p);
    if (out.is_relative()) out = base / out;
    if (!std::filesystem::exists(out)) throw ValidationError(field, "file not found: " + out.string());
    return out;
}

}  // namespace detail

inline Scenario parse_scenario(const Json& doc, const std::filesystem::path& base_dir) {
    using detail::Reader;
    using detail::validate_at;
    Scenario s;
    s.effective = doc;
    Reader root(doc, "");
    s.name = root.get<std::string>("name", "scenario");
    s.output_dir = root.get<std::string>("output_dir", "out");

    // demand
    const auto& classes = root.raw("ev_classes");
    if (!classes.is_array() || classes.empty()) throw ValidationError("ev_classes", "expected a non-empty array");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const std::string path = "ev_classes[" + std::to_string(i) + "]";
        Reader c(classes[i], path);
        EvClass e;
        validate_at(c.at("id"), [&] { e.id = ev_class_from_string(c.get<std::string>("id")); });
        e.battery_kwh = c.get<double>("battery_kwh");
        e.soc_max = c.get<double>("soc_max");
        e.soc_init = c.get<double>("soc_init");
        e.recharge_minutes = c.get<double>("recharge_minutes");
        e.penetration = c.get<double>("penetration");
        e.recharge_rate = c.get<double>("recharge_rate");
        e.fleet_share = c.get<double>("fleet_share");
        validate_at(path, [&] { e.validate(); });
        s.ev_classes.push_back(e);
    }
    {
        Reader t = root.child("traffic");
        if (t.has("csv")) {
            const auto p = detail::resolve(base_dir, t.get<std::string>("csv"), t.at("csv"));
            s.traffic = read_traffic_csv(p.string());
        } else {
            s.traffic.vehicles_per_hour = t.numbers("vehicles_per_hour");
        }
        validate_at(t.at("vehicles_per_hour"), [&] { s.traffic.validate(); });
    }
    s.demand_days = root.get<int>("demand_days", kDaysPerYear);
    if (s.demand_days <= 0) throw ValidationError("demand_days", "must be positive");

    // resources
    {
        Reader r = root.child("solar");
        s.solar.daily_irradiation = r.monthly("daily_irradiation");
        s.solar.clearness_index = r.monthly("clearness_index");
        s.solar.latitude_deg = r.get<double>("latitude_deg", s.solar.latitude_deg);
        s.pv_derate = r.get<double>("derate");
        validate_at("solar", [&] {
            s.solar.validate();
            detail::require(s.pv_derate >= 0.0 && s.pv_derate <= 1.0, "derate must lie in [0,1]");
        });
        if (r.has("profile_csv"))
            s.pv_profile = ProfileFile{detail::resolve(base_dir, r.get<std::string>("profile_csv"), r.at("profile_csv")),
                                       r.get<double>("profile_nameplate_kw")};
    }
    {
        Reader r = root.child("wind");
        s.wind.monthly_mean_speed = r.monthly("monthly_mean_speed");
        s.wind.measurement_height_m = r.get<double>("measurement_height_m", s.wind.measurement_height_m);
        s.wind.hub_height_m = r.get<double>("hub_height_m", s.wind.hub_height_m);
        s.wind.shear_exponent = r.get<double>("shear_exponent");
        if (r.has("variability")) {
            Reader v = r.child("variability");
            auto& var = s.wind.variability;
            var.weibull_shape = v.get<double>("weibull_shape", var.weibull_shape);
            var.diurnal_amplitude = v.get<double>("diurnal_amplitude", var.diurnal_amplitude);
            var.diurnal_peak_hour = v.get<double>("diurnal_peak_hour", var.diurnal_peak_hour);
            if (v.has("synoptic_periods_h")) var.synoptic_periods_h = v.numbers("synoptic_periods_h");
            if (v.has("synoptic_phases_rad")) var.synoptic_phases_rad = v.numbers("synoptic_phases_rad");
        }
        if (r.has("power_curve")) {
            Reader pc = r.child("power_curve");
            s.power_curve.cut_in = pc.get<double>("cut_in", s.power_curve.cut_in);
            s.power_curve.rated = pc.get<double>("rated", s.power_curve.rated);
            s.power_curve.cut_out = pc.get<double>("cut_out", s.power_curve.cut_out);
            s.power_curve.exponent = pc.get<double>("exponent", s.power_curve.exponent);
        }
        validate_at("wind", [&] {
            s.wind.validate();
            s.power_curve.validate();
        });
        if (r.has("profile_csv"))
            s.wind_profile = ProfileFile{detail::resolve(base_dir, r.get<std::string>("profile_csv"), r.at("profile_csv")),
                                         r.get<double>("profile_nameplate_kw")};
    }

    // design space
    {
        Reader m = root.child("menu");
        s.menu.pv_kw = m.numbers("pv_kw");
        s.menu.wind_kw = m.numbers("wind_kw");
        s.menu.diesel_kw = m.numbers("diesel_kw");
        s.menu.battery_kwh = m.numbers("battery_kwh");
        const auto& grid = m.raw("grid");
        if (!grid.is_array()) throw ValidationError(m.at("grid"), "expected an array");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            Reader g(grid[i], m.at("grid") + "[" + std::to_string(i) + "]");
            s.menu.grid.push_back({g.get<bool>("connected"), g.get<double>("limit_kw", 0.0)});
        }
        for (const char* key : {"pv_kw", "wind_kw", "grid", "diesel_kw", "battery_kwh"})
            if (m.raw(key).empty()) throw ValidationError(m.at(key), "menu entry has no options");
        validate_at("menu", [&] { s.menu.validate(); });
    }
    if (root.has("battery")) {
        Reader b = root.child("battery");
        s.battery.soc_min = b.get<double>("soc_min", s.battery.soc_min);
        s.battery.soc_max = b.get<double>("soc_max", s.battery.soc_max);
        s.battery.roundtrip_efficiency = b.get<double>("roundtrip_efficiency", s.battery.roundtrip_efficiency);
        s.battery.max_c_rate = b.get<double>("max_c_rate", s.battery.max_c_rate);
        s.battery.initial_soc = b.get<double>("initial_soc", s.battery.initial_soc);
        validate_at("battery", [&] { s.battery.validate(); });
    }
    if (root.has("dispatch")) {
        Reader d = root.child("dispatch");
        s.merit_order = d.get<bool>("merit_order", s.merit_order);
        s.policy.cycle_charging = d.get<bool>("cycle_charging", s.policy.cycle_charging);
        s.policy.setpoint_soc = d.get<double>("setpoint_soc", s.policy.setpoint_soc);
        s.policy.diesel_fuel_l_per_kwh = d.get<double>("diesel_fuel_l_per_kwh", s.policy.diesel_fuel_l_per_kwh);
        if (d.has("deficit_order")) {
            s.policy.deficit_order.clear();
            for (const auto& name : d.get<std::vector<std::string>>("deficit_order")) {
                if (name == "battery") s.policy.deficit_order.push_back(Dispatchable::kBattery);
                else if (name == "grid") s.policy.deficit_order.push_back(Dispatchable::kGrid);
                else if (name == "diesel") s.policy.deficit_order.push_back(Dispatchable::kDiesel);
                else throw ValidationError(d.at("deficit_order"), "unknown source '" + name + "'");
            }
        }
        validate_at("dispatch", [&] { s.policy.validate(); });
    }
    if (root.has("economics")) {
        Reader e = root.child("economics");
        auto& x = s.econ;
        x.pv_investment_per_kw = e.get<double>("pv_investment_per_kw", x.pv_investment_per_kw);
        x.pv_om_per_kw_year = e.get<double>("pv_om_per_kw_year", x.pv_om_per_kw_year);
        x.wind_investment_per_kw = e.get<double>("wind_investment_per_kw", x.wind_investment_per_kw);
        x.wind_om_per_kw_year = e.get<double>("wind_om_per_kw_year", x.wind_om_per_kw_year);
        x.diesel_investment_per_kw = e.get<double>("diesel_investment_per_kw", x.diesel_investment_per_kw);
        x.diesel_om_per_hour = e.get<double>("diesel_om_per_hour", x.diesel_om_per_hour);
        x.fuel_price_per_l = e.get<double>("fuel_price_per_l", x.fuel_price_per_l);
        x.battery_unit_cost = e.get<double>("battery_unit_cost", x.battery_unit_cost);
        x.battery_unit_om_per_year = e.get<double>("battery_unit_om_per_year", x.battery_unit_om_per_year);
        x.battery_unit_kwh = e.get<double>("battery_unit_kwh", x.battery_unit_kwh);
        x.battery_unit_lifetime_throughput_kwh =
            e.get<double>("battery_unit_lifetime_throughput_kwh", x.battery_unit_lifetime_throughput_kwh);
        x.battery_replacement_year = e.get<int>("battery_replacement_year", x.battery_replacement_year);
        x.grid_price_per_kwh = e.get<double>("grid_price_per_kwh", x.grid_price_per_kwh);
        x.export_price_per_kwh = e.get<double>("export_price_per_kwh", x.export_price_per_kwh);
        x.lifetime_years = e.get<int>("lifetime_years", x.lifetime_years);
        x.discount_rate = e.get<double>("discount_rate", x.discount_rate);
        validate_at("economics", [&] { x.validate(); });
    }
    if (root.has("emissivity")) {
        Reader e = root.child("emissivity");
        auto& x = s.emissivity;
        x.pv = e.get<double>("pv", x.pv);
        x.wind = e.get<double>("wind", x.wind);
        x.diesel = e.get<double>("diesel", x.diesel);
        x.grid = e.get<double>("grid", x.grid);
        x.grid_renewable_fraction = e.get<double>("grid_renewable_fraction", x.grid_renewable_fraction);
        validate_at("emissivity", [&] { x.validate(); });
    }
    if (root.has("reliability")) {
        Reader e = root.child("reliability");
        auto& x = s.reliability;
        x.pv = e.get<double>("pv", x.pv);
        x.wind = e.get<double>("wind", x.wind);
        x.diesel = e.get<double>("diesel", x.diesel);
        x.grid = e.get<double>("grid", x.grid);
        x.battery = e.get<double>("battery", x.battery);
        const auto ref = e.get<std::string>("battery_reference", "daily");
        if (ref == "daily") x.battery_reference = BatteryReference::kDailyDemand;
        else if (ref == "annual") x.battery_reference = BatteryReference::kAnnualDemand;
        else throw ValidationError(e.at("battery_reference"), "expected 'daily' or 'annual'");
        validate_at("reliability", [&] { x.validate(); });
    }
    if (root.has("weights")) {
        const auto w = root.numbers("weights");
        if (w.size() != 5) throw ValidationError("weights", "expected five weights");
        std::copy(w.begin(), w.end(), s.weights.w.begin());
        validate_at("weights", [&] { s.weights.validate(); });
    }
    s.max_shortage = root.get<double>("max_shortage", s.max_shortage);
    if (!(s.max_shortage >= 0.0 && s.max_shortage <= 1.0)) throw ValidationError("max_shortage", "must lie in [0,1]");

    if (root.has("verification")) {
        Reader v = root.child("verification");
        s.p_lab_kw = v.get<double>("p_lab_kw", s.p_lab_kw);
        if (!(s.p_lab_kw > 0.0)) throw ValidationError(v.at("p_lab_kw"), "must be positive");
        s.verify_initial_soc = v.get<double>("initial_soc", s.verify_initial_soc);
        s.limits.max_loss_rate = v.get<double>("max_loss_rate", s.limits.max_loss_rate);
        s.limits.soc_min = v.get<double>("soc_min", s.limits.soc_min);
        s.limits.soc_max = v.get<double>("soc_max", s.limits.soc_max);
        s.day.day_of_year = v.get<int>("day_of_year", s.day.day_of_year);
        s.day.start_hour = v.get<double>("start_hour", s.day.start_hour);
        s.day.step_minutes = v.get<int>("step_minutes", s.day.step_minutes);
        s.day.wind_fluctuation = v.get<double>("wind_fluctuation", s.day.wind_fluctuation);
        s.day.wind_correlation = v.get<double>("wind_correlation", s.day.wind_correlation);
        s.day.seed = v.get<std::uint64_t>("seed", s.day.seed);
        validate_at("verification", [&] {
            s.limits.validate();
            s.day.validate();
            s.battery.sized(0).validate();
            detail::require(s.verify_initial_soc >= s.battery.soc_min && s.verify_initial_soc <= s.battery.soc_max,
                            "initial SOC must lie within the battery SOC window");
        });
    }
    return s;
}

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path.string(), "cannot open scenario file");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path.string(), std::string("invalid JSON: ") + e.what());
    }
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_json_file(path), path.parent_path());
}

}  // namespace hres
