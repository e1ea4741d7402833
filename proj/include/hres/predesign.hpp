#pragma once

// Design-space enumeration, static discard rules, feasibility screening and the
// NPC-ordered candidate list.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hres/dispatch.hpp"
#include "hres/error.hpp"
#include "hres/resources.hpp"

namespace hres {

struct GridOption {
    bool connected = false;
    double limit_kw = 0.0;

    friend bool operator==(const GridOption&, const GridOption&) = default;
};

struct ComponentMenu {
    std::vector<double> pv_kw;
    std::vector<double> wind_kw;
    std::vector<GridOption> grid;
    std::vector<double> diesel_kw;
    std::vector<double> battery_kwh;

    void validate() const {
        detail::require(!pv_kw.empty() && !wind_kw.empty() && !grid.empty() && !diesel_kw.empty() && !battery_kwh.empty(),
                        "every menu entry needs at least one option");
        for (const auto* v : {&pv_kw, &wind_kw, &diesel_kw, &battery_kwh})
            for (double x : *v) detail::require(x >= 0.0, "menu sizes must be non-negative");
        for (const auto& g : grid)
            detail::require(g.connected == (g.limit_kw > 0.0), "grid limit must be positive iff connected");
    }

    std::size_t size() const { return pv_kw.size() * wind_kw.size() * grid.size() * diesel_kw.size() * battery_kwh.size(); }
};

/// Full Cartesian product, PV outermost and battery innermost.
inline std::vector<Configuration> enumerate(const ComponentMenu& menu) {
    menu.validate();
    std::vector<Configuration> out;
    out.reserve(menu.size());
    for (double pv : menu.pv_kw)
        for (double w : menu.wind_kw)
            for (const auto& g : menu.grid)
                for (double d : menu.diesel_kw)
                    for (double b : menu.battery_kwh) out.push_back({pv, w, g.connected, g.limit_kw, d, b});
    return out;
}

inline constexpr const char* kReasonNoRenewables = "no renewable generation";
inline constexpr const char* kReasonRedundantGenerator = "generator redundant with grid";

/// Static rejection reason, or nothing if the configuration is admissible.
inline std::optional<std::string> discard_reason(const Configuration& cfg) {
    if (!cfg.has_renewables()) return kReasonNoRenewables;
    if (cfg.grid_connected && cfg.diesel_kw > 0.0) return kReasonRedundantGenerator;
    return std::nullopt;
}

inline std::string infeasible_reason(double shortage, double max_shortage) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "capacity shortage %.2f%% exceeds %.2f%%", shortage * 100.0, max_shortage * 100.0);
    return buf;
}

struct Discard {
    Configuration config;
    std::string reason;
    std::optional<double> shortage;  ///< set when the configuration was simulated
};

struct ScreenedConfigurations {
    std::vector<Configuration> retained;
    std::vector<Discard> discarded;
};

inline ScreenedConfigurations apply_discard_rules(const std::vector<Configuration>& cfgs) {
    ScreenedConfigurations out;
    for (const auto& c : cfgs) {
        if (auto why = discard_reason(c))
            out.discarded.push_back({c, *why, std::nullopt});
        else
            out.retained.push_back(c);
    }
    return out;
}

struct Candidate {
    Configuration config;
    EnergyLedger ledger;
    double npc = 0.0;
    DispatchPolicy policy;
};

struct CandidateSet {
    std::vector<Candidate> candidates;  ///< ascending NPC
    std::vector<Discard> discarded;
};

/// Everything a configuration needs besides its own sizes.
struct PredesignInputs {
    DemandCurve demand;              ///< full horizon, one value per step
    GenerationProfile pv_shape;      ///< any nameplate; rescaled per configuration
    GenerationProfile wind_shape;
    BatteryParams battery;           ///< capacity overridden per configuration
    EconParams econ;
    DispatchPolicy policy;
    bool merit_order = true;         ///< reorder dispatchables by marginal cost per configuration
    double max_shortage = 0.10;
};

inline DispatchPolicy policy_for(const Configuration& cfg, const PredesignInputs& in) {
    return in.merit_order ? merit_order_policy(cfg, in.econ, in.policy) : in.policy;
}

inline Candidate simulate_candidate(const Configuration& cfg, const PredesignInputs& in, bool record_trace = false) {
    try {
        Candidate c{cfg, {}, 0.0, policy_for(cfg, in)};
        c.ledger = simulate_year(cfg, in.demand, SourceProfiles::for_config(in.pv_shape, in.wind_shape, cfg),
                                 in.battery.sized(cfg.battery_kwh), c.policy, record_trace);
        c.npc = npc(cfg, c.ledger, in.econ);
        return c;
    } catch (const std::exception& e) {
        throw Error("configuration " + cfg.label() + ": " + e.what());
    }
}

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = std::thread::hardware_concurrency()) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    };
    std::vector<std::future<void>> jobs;
    for (unsigned t = 1; t < threads; ++t) jobs.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& j : jobs) j.get();  // rethrows the first worker failure
}

/// Static discard rules first, then annual simulation of the rest; survivors that meet
/// the shortage limit are sorted by NPC (label breaks ties).
inline CandidateSet build_candidates(const ComponentMenu& menu, const PredesignInputs& in) {
    detail::require(in.max_shortage >= 0.0 && in.max_shortage <= 1.0, "max shortage must lie in [0,1]");
    auto screened = apply_discard_rules(enumerate(menu));
    std::vector<Candidate> sims(screened.retained.size());
    parallel_for(sims.size(), [&](std::size_t i) { sims[i] = simulate_candidate(screened.retained[i], in); });

    CandidateSet out;
    out.discarded = std::move(screened.discarded);
    for (auto& c : sims) {
        const double shortage = c.ledger.shortage_fraction();
        if (feasible(c.ledger, in.max_shortage))
            out.candidates.push_back(std::move(c));
        else
            out.discarded.push_back({c.config, infeasible_reason(shortage, in.max_shortage), shortage});
    }
    std::stable_sort(out.candidates.begin(), out.candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.npc != b.npc) return a.npc < b.npc;
        return a.config.label() < b.config.label();
    });
    return out;
}

}  // namespace hres
