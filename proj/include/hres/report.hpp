#pragma once

// JSON and CSV renderings of configurations, ledgers, rankings and verification runs.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hres/criteria.hpp"
#include "hres/csv.hpp"
#include "hres/dispatch.hpp"
#include "hres/mcdm.hpp"
#include "hres/predesign.hpp"
#include "hres/verify.hpp"

namespace hres {

using Json = nlohmann::json;

inline Json to_json(const Configuration& c) {
    return {{"pv_kw", c.pv_kw},         {"wind_kw", c.wind_kw},       {"grid_connected", c.grid_connected},
            {"grid_limit_kw", c.grid_limit_kw}, {"diesel_kw", c.diesel_kw}, {"battery_kwh", c.battery_kwh},
            {"label", c.label()},        {"category", c.category()}};
}

inline Configuration configuration_from_json(const Json& j) {
    Configuration c;
    c.pv_kw = j.at("pv_kw").get<double>();
    c.wind_kw = j.at("wind_kw").get<double>();
    c.grid_connected = j.at("grid_connected").get<bool>();
    c.grid_limit_kw = j.at("grid_limit_kw").get<double>();
    c.diesel_kw = j.at("diesel_kw").get<double>();
    c.battery_kwh = j.at("battery_kwh").get<double>();
    c.validate();
    return c;
}

inline Json to_json(const CriteriaScores& s) {
    return {{"emr", s.emr}, {"reg", s.reg}, {"ecf", s.ecf}, {"ss", s.ss}, {"esa", s.esa}};
}

inline CriteriaScores scores_from_json(const Json& j) {
    return {j.at("emr").get<double>(), j.at("reg").get<double>(), j.at("ecf").get<double>(), j.at("ss").get<double>(),
            j.at("esa").get<double>()};
}

inline Json to_json(const DispatchPolicy& p) {
    Json order = Json::array();
    for (auto d : p.deficit_order) order.push_back(to_string(d));
    return {{"deficit_order", order},
            {"cycle_charging", p.cycle_charging},
            {"setpoint_soc", p.setpoint_soc},
            {"diesel_fuel_l_per_kwh", p.diesel_fuel_l_per_kwh}};
}

/// Annual aggregates; the hourly trace goes to CSV.
inline Json ledger_summary(const EnergyLedger& L) {
    return {{"steps", L.steps},
            {"step_hours", L.step_hours},
            {"demand_kwh", L.demand_kwh},
            {"served_kwh", L.served_kwh()},
            {"generation_kwh", L.generation_kwh()},
            {"pv_generated_kwh", L.pv_generated_kwh},
            {"wind_generated_kwh", L.wind_generated_kwh},
            {"pv_to_load_kwh", L.pv_to_load_kwh},
            {"wind_to_load_kwh", L.wind_to_load_kwh},
            {"grid_import_kwh", L.grid_import_kwh},
            {"grid_export_kwh", L.grid_export_kwh},
            {"diesel_kwh", L.diesel_kwh},
            {"diesel_hours", L.diesel_hours},
            {"diesel_fuel_l", L.diesel_fuel_l},
            {"battery_charge_kwh", L.battery_charge_kwh},
            {"battery_throughput_kwh", L.battery_throughput_kwh},
            {"unmet_kwh", L.unmet_kwh},
            {"curtailed_kwh", L.curtailed_kwh},
            {"shortage_fraction", L.shortage_fraction()},
            {"soc_min", L.soc_min_seen},
            {"soc_max", L.soc_max_seen},
            {"max_residual_kwh", L.max_residual_kwh}};
}

inline Json to_json(const CostStack& c) {
    return {{"investment", c.investment},
            {"annual_om", c.annual_om},
            {"annual_fuel", c.annual_fuel},
            {"annual_grid_purchase", c.annual_grid_purchase},
            {"annual_export_credit", c.annual_export_credit},
            {"replacement", c.replacement},
            {"replacement_year", c.replacement_year},
            {"battery_units", c.battery_units}};
}

inline Json candidates_json(const CandidateSet& set) {
    Json entries = Json::array();
    for (const auto& c : set.candidates)
        entries.push_back({{"configuration", to_json(c.config)},
                           {"status", "candidate"},
                           {"feasible", true},
                           {"shortage_fraction", c.ledger.shortage_fraction()},
                           {"npc", c.npc},
                           {"discard_reason", nullptr}});
    for (const auto& d : set.discarded)
        entries.push_back({{"configuration", to_json(d.config)},
                           {"status", "discarded"},
                           {"feasible", d.shortage ? Json(false) : Json(nullptr)},
                           {"shortage_fraction", d.shortage ? Json(*d.shortage) : Json(nullptr)},
                           {"npc", nullptr},
                           {"discard_reason", d.reason}});
    return entries;
}

inline Json to_json(const RankedDesign& r) {
    return {{"rank", r.rank},
            {"label", r.design.label},
            {"configuration", to_json(r.design.config)},
            {"scores", to_json(r.design.scores)},
            {"cp", r.cp},
            {"npc", r.design.npc},
            {"lcoe", r.design.lcoe}};
}

inline RankedDesign ranked_from_json(const Json& j) {
    RankedDesign r;
    r.rank = j.at("rank").get<int>();
    r.design.label = j.at("label").get<std::string>();
    r.design.config = configuration_from_json(j.at("configuration"));
    r.design.scores = scores_from_json(j.at("scores"));
    r.design.npc = j.at("npc").get<double>();
    r.design.lcoe = j.at("lcoe").get<double>();
    r.cp = j.at("cp").get<double>();
    return r;
}

inline void write_ranking_csv(std::ostream& os, const std::vector<RankedDesign>& ranked) {
    os << "rank,label,category,pv_kw,wind_kw,grid_connected,grid_limit_kw,diesel_kw,battery_kwh,"
          "emr,reg,ecf,ss,esa,cp,npc,lcoe\n";
    for (const auto& r : ranked) {
        const auto& c = r.design.config;
        const auto& s = r.design.scores;
        os << r.rank << ',' << r.design.label << ',' << c.category() << ',' << csv::format_number(c.pv_kw) << ','
           << csv::format_number(c.wind_kw) << ',' << (c.grid_connected ? 1 : 0) << ','
           << csv::format_number(c.grid_limit_kw) << ',' << csv::format_number(c.diesel_kw) << ','
           << csv::format_number(c.battery_kwh);
        for (double v : {s.emr, s.reg, s.ecf, s.ss, s.esa, r.cp, r.design.npc, r.design.lcoe})
            os << ',' << csv::format_number(v);
        os << '\n';
    }
}

/// Fixed-width table in percent, in the layout of a printed results table.
inline void write_ranking_text(std::ostream& os, const std::vector<RankedDesign>& ranked) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-20s %-24s %7s %7s %7s %7s %7s %7s %12s\n", "#", "Category", "Design", "EmR",
                  "ReG", "EcF", "SS", "ESA", "Total", "NPC (EUR)");
    os << line;
    for (const auto& r : ranked) {
        const auto& s = r.design.scores;
        std::snprintf(line, sizeof line, "%-4d %-20s %-24s %7s %7s %7s %7s %7s %7s %12.0f\n", r.rank,
                      r.design.config.category().c_str(), r.design.label.c_str(), format_percent(s.emr).c_str(),
                      format_percent(s.reg).c_str(), format_percent(s.ecf).c_str(), format_percent(s.ss).c_str(),
                      format_percent(s.esa).c_str(), format_percent(r.cp).c_str(), r.design.npc);
        os << line;
    }
}

inline Json to_json(const VerificationReport& r) {
    return {{"design_label", r.design_label},
            {"design_rank", r.design_rank},
            {"scale_factor", r.sf},
            {"step_minutes", r.step_minutes},
            {"steps", r.flows.size()},
            {"max_loss_rate", r.max_loss_rate},
            {"has_battery", r.has_battery},
            {"soc_start", r.has_battery ? Json(r.soc_start) : Json(nullptr)},
            {"soc_end", r.has_battery ? Json(r.soc_end) : Json(nullptr)},
            {"soc_min", r.has_battery ? Json(r.soc_min) : Json(nullptr)},
            {"soc_max", r.has_battery ? Json(r.soc_max) : Json(nullptr)},
            {"verdict", r.passed ? "pass" : "fail"},
            {"failed_condition", r.passed ? Json(nullptr) : Json(r.failed_condition)},
            {"failed_step", r.failed_step ? Json(*r.failed_step) : Json(nullptr)}};
}

/// Scaled per-step traces; loss_rate is empty where the step was skipped.
inline void write_verification_csv(std::ostream& os, const VerificationReport& r) {
    os << "time_min,demand_kw,pv_kw,wind_kw,grid_import_kw,diesel_kw,battery_charge_kw,battery_discharge_kw,"
          "curtailed_kw,unmet_kw,soc,loss_rate\n";
    for (std::size_t k = 0; k < r.flows.size(); ++k) {
        const auto& f = r.flows[k];
        os << csv::format_number(k * r.step_minutes);
        for (double v : {f.demand, f.pv, f.wind, f.grid_import, f.diesel, f.battery_charge, f.battery_discharge,
                         f.curtailed, f.unmet})
            os << ',' << csv::format_number(v);
        os << ',' << (r.has_battery ? csv::format_number(f.soc_after) : "");
        os << ',' << (std::isnan(r.loss_rate[k]) ? "" : csv::format_number(r.loss_rate[k])) << '\n';
    }
}

}  // namespace hres
