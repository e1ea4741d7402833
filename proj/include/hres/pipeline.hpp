#pragma once

// End-to-end driver: demand -> candidates -> ranking -> verification, with every stage
// persisting its artifacts so later stages can be re-run on their own.
//
// Artifacts (all stamped with the scenario hash and tool version):
//   demand.csv                   daily template, per class and total
//   candidates.json              every enumerated configuration with its fate
//   ranking.csv / ranking.json   ranked designs, scores as fractions
//   ranking.txt                  the same in percent, for people
//   ledger_rank{k}.csv/.json     hourly trace and annual summary of the top designs
//   verify_rank{k}.csv/.json     scaled-day traces and verdict

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hres/criteria.hpp"
#include "hres/csv.hpp"
#include "hres/demand.hpp"
#include "hres/dispatch.hpp"
#include "hres/mcdm.hpp"
#include "hres/predesign.hpp"
#include "hres/report.hpp"
#include "hres/resources.hpp"
#include "hres/scenario.hpp"
#include "hres/verify.hpp"
#include "hres/version.hpp"

namespace hres {

namespace fs = std::filesystem;

/// FNV-1a 64 of the compact JSON text, as 16 hex digits.
inline std::string scenario_hash(const Json& effective) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : effective.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> weights;
    std::optional<double> max_shortage;
    std::optional<int> step_minutes;
};

/// Writes command-line overrides into the scenario document so they are hashed too.
inline void apply_overrides(Json& doc, const Overrides& o) {
    if (o.seed) doc["verification"]["seed"] = *o.seed;
    if (o.weights) {
        WeightVector w;
        try {
            w = WeightVector::parse(*o.weights);
        } catch (const InvalidParameter& e) {
            throw ValidationError("weights", e.what());
        }
        doc["weights"] = w.w;
    }
    if (o.max_shortage) doc["max_shortage"] = *o.max_shortage;
    if (o.step_minutes) doc["verification"]["step_minutes"] = *o.step_minutes;
}

inline Scenario load_scenario(const fs::path& path, const Overrides& o) {
    Json doc = read_json_file(path);
    apply_overrides(doc, o);
    return parse_scenario(doc, path.parent_path());
}

struct Provenance {
    std::string scenario_hash;
    std::string tool_version = kToolVersion;

    explicit Provenance(const Scenario& s) : scenario_hash(hres::scenario_hash(s.effective)) {}

    std::string csv_comment() const { return "# scenario_hash=" + scenario_hash + ",tool_version=" + tool_version + "\n"; }
    Json stamp(Json body) const {
        return {{"scenario_hash", scenario_hash}, {"tool_version", tool_version}, {"data", std::move(body)}};
    }
};

// ---------------------------------------------------------------------------
// Inputs shared by the stages

inline DemandCurve daily_demand(const Scenario& s) { return evcs_demand_curve(s.traffic, s.ev_classes); }

inline GenerationProfile pv_shape(const Scenario& s) {
    if (s.pv_profile) return load_profile_csv(s.pv_profile->path.string(), s.pv_profile->nameplate_kw);
    return synthesize_solar(s.solar, 1.0, s.pv_derate);
}

inline GenerationProfile wind_shape(const Scenario& s) {
    if (s.wind_profile) return load_profile_csv(s.wind_profile->path.string(), s.wind_profile->nameplate_kw);
    return synthesize_wind(s.wind, 1.0, s.power_curve);
}

inline PredesignInputs predesign_inputs(const Scenario& s, const DemandCurve& daily) {
    PredesignInputs in;
    in.demand = daily.tiled(static_cast<std::size_t>(s.demand_days));
    detail::require(in.demand.size() == static_cast<std::size_t>(kHoursPerYear),
                    "annual simulation needs 365 days of hourly demand");
    in.pv_shape = pv_shape(s);
    in.wind_shape = wind_shape(s);
    in.battery = s.battery;
    in.econ = s.econ;
    in.policy = s.policy;
    in.merit_order = s.merit_order;
    in.max_shortage = s.max_shortage;
    return in;
}

// ---------------------------------------------------------------------------
// Artifact I/O

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DependencyError("missing artifact '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fails unless `text` (CSV comment or JSON stamp) carries this scenario's hash.
inline void require_fresh(const fs::path& path, const std::string& hash_in_file, const Provenance& prov) {
    if (hash_in_file != prov.scenario_hash)
        throw DependencyError("artifact '" + path.string() + "' was produced from a different scenario (hash " +
                              hash_in_file + "); re-run the upstream stage");
}

inline std::string csv_stamp_hash(const std::string& text) {
    const std::string key = "# scenario_hash=";
    if (text.rfind(key, 0) != 0) return "";
    const auto end = text.find_first_of(",\n", key.size());
    return text.substr(key.size(), end - key.size());
}

inline constexpr const char* kDemandCsv = "demand.csv";
inline constexpr const char* kCandidatesJson = "candidates.json";
inline constexpr const char* kRankingJson = "ranking.json";

inline std::string ledger_name(int rank, const char* ext) { return "ledger_rank" + std::to_string(rank) + ext; }
inline std::string verify_name(int rank, const char* ext) { return "verify_rank" + std::to_string(rank) + ext; }

// ---------------------------------------------------------------------------
// Stages

/// Writes the daily demand template.
inline DemandCurve stage_demand(const Scenario& s, const fs::path& out_dir) {
    const Provenance prov(s);
    fs::create_directories(out_dir);
    const auto total = daily_demand(s);
    std::ostringstream os;
    os << prov.csv_comment() << "hour,vehicles_per_hour";
    for (const auto& c : s.ev_classes) os << ',' << to_string(c.id) << "_kw";
    os << ",total_kw\n";
    std::vector<DemandCurve> parts;
    for (const auto& c : s.ev_classes) parts.push_back(class_demand_curve(s.traffic, c));
    for (std::size_t h = 0; h < total.size(); ++h) {
        os << h << ',' << csv::format_number(s.traffic.vehicles_per_hour[h]);
        for (const auto& p : parts) os << ',' << csv::format_number(p.kw[h]);
        os << ',' << csv::format_number(total.kw[h]) << '\n';
    }
    write_text(out_dir / kDemandCsv, os.str());
    return total;
}

/// Reads the persisted daily demand (last column) after checking its provenance.
inline DemandCurve load_demand_artifact(const Scenario& s, const fs::path& out_dir) {
    const Provenance prov(s);
    const auto path = out_dir / kDemandCsv;
    const auto text = read_text(path);
    require_fresh(path, csv_stamp_hash(text), prov);
    std::istringstream in(text);
    const auto table = csv::parse(in, 2);
    DemandCurve d;
    for (std::size_t i = 0; i < table.rows.size(); ++i) d.kw.push_back(csv::parse_number(table.rows[i].back(), i + 1));
    return d;
}

struct RankOutcome {
    CandidateSet candidates;
    std::vector<RankedDesign> ranked;
};

inline std::vector<ScoredDesign> score_candidates(const Scenario& s, const CandidateSet& set, const DemandCurve& annual) {
    std::vector<ScoredDesign> out;
    for (const auto& c : set.candidates) {
        const auto a = assess(c.config, c.ledger, annual, s.econ, s.emissivity, s.reliability);
        out.push_back({c.config, c.config.label(), c.npc, a.scores, a.lcoe});
    }
    return out;
}

/// Simulates, filters, scores and ranks; writes candidates, ranking and top ledgers.
inline RankOutcome stage_rank(const Scenario& s, const fs::path& out_dir, int ledgers_to_write = 3) {
    const Provenance prov(s);
    const auto daily = load_demand_artifact(s, out_dir);
    const auto in = predesign_inputs(s, daily);

    RankOutcome r;
    r.candidates = build_candidates(s.menu, in);
    write_text(out_dir / kCandidatesJson, prov.stamp(candidates_json(r.candidates)).dump(2) + "\n");
    if (r.candidates.candidates.empty()) throw Error("no feasible candidate survived the predesign filters");

    r.ranked = rank(score_candidates(s, r.candidates, in.demand), s.weights);

    Json ranking = Json::array();
    for (const auto& d : r.ranked) ranking.push_back(to_json(d));
    write_text(out_dir / kRankingJson, prov.stamp(ranking).dump(2) + "\n");
    std::ostringstream csv_out, txt;
    csv_out << prov.csv_comment();
    write_ranking_csv(csv_out, r.ranked);
    write_text(out_dir / "ranking.csv", csv_out.str());
    txt << prov.csv_comment();
    write_ranking_text(txt, r.ranked);
    write_text(out_dir / "ranking.txt", txt.str());

    for (int k = 1; k <= std::min<int>(ledgers_to_write, static_cast<int>(r.ranked.size())); ++k) {
        const auto& cfg = r.ranked[k - 1].design.config;
        const auto cand = simulate_candidate(cfg, in, true);
        std::ostringstream lc;
        lc << prov.csv_comment();
        write_ledger_csv(lc, cand.ledger);
        write_text(out_dir / ledger_name(k, ".csv"), lc.str());
        Json summary = {{"configuration", to_json(cfg)},
                        {"policy", to_json(cand.policy)},
                        {"ledger", ledger_summary(cand.ledger)},
                        {"costs", to_json(cost_stack(cfg, cand.ledger, s.econ))},
                        {"npc", cand.npc},
                        {"lcoe", lcoe(cfg, cand.ledger, s.econ)}};
        write_text(out_dir / ledger_name(k, ".json"), prov.stamp(summary).dump(2) + "\n");
    }
    return r;
}

inline std::vector<RankedDesign> load_ranking_artifact(const Scenario& s, const fs::path& out_dir) {
    const Provenance prov(s);
    const auto path = out_dir / kRankingJson;
    Json doc;
    try {
        doc = Json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw DependencyError("unreadable artifact '" + path.string() + "': " + e.what());
    }
    require_fresh(path, doc.value("scenario_hash", ""), prov);
    std::vector<RankedDesign> out;
    for (const auto& j : doc.at("data")) out.push_back(ranked_from_json(j));
    return out;
}

/// Scaled-day verification of one configuration under the scenario's settings.
inline VerificationReport verify_design(const Scenario& s, const Configuration& cfg, const DemandCurve& daily) {
    const auto annual = daily.tiled(static_cast<std::size_t>(s.demand_days));
    const DayTraces traces = (s.pv_profile || s.wind_profile)
                                 ? build_day_traces(cfg, annual, pv_shape(s), wind_shape(s), s.day)
                                 : build_day_traces(cfg, annual, s.solar, s.pv_derate, s.wind, s.power_curve, s.day);
    const auto sc = scale(cfg, annual, traces, s.p_lab_kw);
    BatteryParams bat = s.battery;
    bat.initial_soc = s.verify_initial_soc;
    const auto policy = s.merit_order ? merit_order_policy(cfg, s.econ, s.policy) : s.policy;
    auto rep = verify_run(sc, bat, s.limits, policy);
    rep.design_label = cfg.label();
    return rep;
}

struct VerifyOutcome {
    std::vector<VerificationReport> reports;
    std::optional<int> passed_rank;
};

/// Verifies in rank order until one design passes, or only `design_rank` when given.
inline VerifyOutcome stage_verify(const Scenario& s, const fs::path& out_dir, std::optional<int> design_rank = {}) {
    const Provenance prov(s);
    const auto daily = load_demand_artifact(s, out_dir);
    auto ranked = load_ranking_artifact(s, out_dir);
    if (design_rank) {
        if (*design_rank < 1 || *design_rank > static_cast<int>(ranked.size()))
            throw InvalidParameter("--design must lie in [1, " + std::to_string(ranked.size()) + "]");
        ranked = {ranked[static_cast<std::size_t>(*design_rank - 1)]};
    }
    const auto cascade = verify_cascade(ranked, [&](const RankedDesign& d) { return verify_design(s, d.design.config, daily); });

    VerifyOutcome out;
    for (const auto& rep : cascade.reports) {
        std::ostringstream csv_out;
        csv_out << prov.csv_comment();
        write_verification_csv(csv_out, rep);
        write_text(out_dir / verify_name(rep.design_rank, ".csv"), csv_out.str());
        Json body = to_json(rep);
        body["limits"] = {{"max_loss_rate", s.limits.max_loss_rate},
                          {"soc_min", s.limits.soc_min},
                          {"soc_max", s.limits.soc_max}};
        body["p_lab_kw"] = s.p_lab_kw;
        body["day_of_year"] = s.day.day_of_year;
        body["start_hour"] = s.day.start_hour;
        body["seed"] = s.day.seed;
        write_text(out_dir / verify_name(rep.design_rank, ".json"), prov.stamp(body).dump(2) + "\n");
    }
    if (cascade.passed) out.passed_rank = ranked[*cascade.passed].rank;
    out.reports = cascade.reports;
    return out;
}

struct PipelineResult {
    RankOutcome rank;
    VerifyOutcome verify;
    bool ok() const { return verify.passed_rank.has_value(); }
};

inline PipelineResult run_pipeline(const Scenario& s, const fs::path& out_dir) {
    stage_demand(s, out_dir);
    PipelineResult r;
    r.rank = stage_rank(s, out_dir);
    r.verify = stage_verify(s, out_dir);
    return r;
}

}  // namespace hres
