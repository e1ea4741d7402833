// Command-line driver for the HRES design pipeline.
//
//   hres_cli run    --scenario s.json --out dir      all stages; exit 0 iff a design verifies
//   hres_cli demand --scenario s.json --out dir
//   hres_cli rank   --scenario s.json --out dir      needs demand.csv
//   hres_cli verify --scenario s.json --out dir [--design k]   needs ranking.json

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hres/hres.hpp"

namespace {

struct Options {
    std::string scenario;
    std::string out;
    hres::Overrides overrides;
    std::optional<int> design;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
    cmd->add_option("--out", o.out, "Artifact directory (default: scenario output_dir)");
    cmd->add_option("--seed", o.overrides.seed, "Seed for the verification wind fluctuation");
    cmd->add_option("--weights", o.overrides.weights, "Criterion weights a,b,c,d,e (EmR,ReG,EcF,SS,ESA)");
    cmd->add_option("--max-shortage", o.overrides.max_shortage, "Maximum unmet-load fraction for feasibility");
    cmd->add_option("--step-min", o.overrides.step_minutes, "Verification time step in minutes");
}

void print_ranking(const std::vector<hres::RankedDesign>& ranked, std::size_t rows) {
    std::vector<hres::RankedDesign> head(ranked.begin(), ranked.begin() + std::min(rows, ranked.size()));
    hres::write_ranking_text(std::cout, head);
}

void print_verification(const hres::VerifyOutcome& v) {
    for (const auto& r : v.reports) {
        std::printf("verify rank %d %-22s %s  max loss %.2f%%", r.design_rank, r.design_label.c_str(),
                    r.passed ? "PASS" : "FAIL", r.max_loss_rate * 100.0);
        if (r.has_battery) std::printf("  SOC %.1f%%..%.1f%% (start %.1f%%, end %.1f%%)", r.soc_min * 100, r.soc_max * 100,
                                       r.soc_start * 100, r.soc_end * 100);
        if (!r.passed) std::printf("  [%s]", r.failed_condition.c_str());
        std::printf("\n");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid renewable energy system designer for EV charging stations"};
    app.set_version_flag("--version", std::string(hres::kToolVersion));
    app.require_subcommand(1);
    Options o;
    auto* run = app.add_subcommand("run", "Run every stage");
    auto* demand = app.add_subcommand("demand", "Build the station demand curve");
    auto* rank = app.add_subcommand("rank", "Simulate, filter, score and rank the configuration menu");
    auto* verify = app.add_subcommand("verify", "Scaled-day verification of ranked designs");
    for (auto* cmd : {run, demand, rank, verify}) add_common(cmd, o);
    verify->add_option("--design", o.design, "Verify only the design at this rank");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto scenario = hres::load_scenario(o.scenario, o.overrides);
        const std::filesystem::path out = o.out.empty() ? std::filesystem::path(scenario.output_dir) : std::filesystem::path(o.out);
        std::filesystem::create_directories(out);

        if (*run) {
            const auto r = hres::run_pipeline(scenario, out);
            std::printf("%zu candidates, %zu discarded\n", r.rank.candidates.candidates.size(),
                        r.rank.candidates.discarded.size());
            print_ranking(r.rank.ranked, 10);
            print_verification(r.verify);
            return r.ok() ? 0 : 2;
        }
        if (*demand) {
            const auto d = hres::stage_demand(scenario, out);
            std::printf("peak %.2f kW, daily energy %.1f kWh\n", d.peak_kw(), d.energy_kwh());
            return 0;
        }
        if (*rank) {
            const auto r = hres::stage_rank(scenario, out);
            print_ranking(r.ranked, 10);
            return 0;
        }
        const auto v = hres::stage_verify(scenario, out, o.design);
        print_verification(v);
        return v.passed_rank ? 0 : 2;
    } catch (const hres::ValidationError& e) {
        std::fprintf(stderr, "invalid scenario: %s\n", e.what());
        return 3;
    } catch (const hres::DependencyError& e) {
        std::fprintf(stderr, "missing dependency: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
