#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include "hres/pipeline.hpp"
#include "oracles.hpp"

using namespace hres;

namespace {

const Scenario& valencia() {
    static const Scenario s = load_scenario(std::filesystem::path(HRES_SOURCE_DIR) / "scenarios/valencia.json");
    return s;
}

const CandidateSet& valencia_candidates() {
    static const CandidateSet set = build_candidates(valencia().menu, predesign_inputs(valencia(), daily_demand(valencia())));
    return set;
}

bool contains(const std::vector<Configuration>& v, const Configuration& c) { return std::find(v.begin(), v.end(), c) != v.end(); }

// Retained options of the reference study as (pv, wind, grid, diesel, battery).
struct Row { int option; double pv, wind; bool grid; double diesel, battery; };
const std::vector<Row> kSelected{
    {1, 500, 0, true, 0, 0},        {4, 0, 330, true, 0, 0},        {6, 500, 0, true, 0, 960},
    {9, 500, 0, true, 0, 1920},     {10, 500, 330, false, 0, 4800}, {11, 500, 330, true, 0, 0},
    {15, 500, 0, true, 0, 2880},    {16, 0, 330, true, 0, 960},     {18, 500, 330, true, 0, 960},
    {23, 0, 330, true, 0, 1920},    {25, 500, 330, true, 0, 1920},  {29, 500, 0, true, 0, 4800},
    {30, 0, 330, true, 0, 2880},    {32, 500, 330, true, 0, 2880},  {37, 500, 330, false, 280, 4800},
    {38, 0, 330, true, 0, 4800},    {39, 500, 330, true, 0, 4800},  {43, 500, 330, false, 280, 2880},
    {44, 500, 330, false, 280, 1920}, {45, 500, 0, false, 280, 4800}, {46, 500, 0, false, 280, 2880},
    {47, 0, 330, false, 280, 2880}, {48, 0, 330, false, 280, 4800}, {49, 0, 330, false, 280, 1920},
    {52, 500, 330, false, 280, 0},  {53, 500, 0, false, 280, 0},    {54, 0, 330, false, 280, 0},
};

Configuration cfg_of(const Row& r) { return {r.pv, r.wind, r.grid, r.grid ? 270.0 : 0.0, r.diesel, r.battery}; }

}  // namespace

TEST(Enumerate, ValenciaMenuHas80Configurations) {
    const auto all = enumerate(valencia().menu);
    EXPECT_EQ(all.size(), 80u);
    std::set<std::string> labels;
    for (const auto& c : all) labels.insert(c.label() + (c.grid_connected ? "" : "|off"));
    EXPECT_EQ(labels.size(), 80u);
    EXPECT_EQ(all.front(), (Configuration{0, 0, false, 0, 0, 0}));
    EXPECT_EQ(all[1].battery_kwh, 960.0);  // battery varies fastest
}

TEST(Enumerate, SingletonMenu) {
    const ComponentMenu m{{500}, {330}, {{true, 270}}, {0}, {4800}};
    const auto all = enumerate(m);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(all[0], (Configuration{500, 330, true, 270, 0, 4800}));
}

TEST(Enumerate, MenuWithoutZeroEntries) {
    const ComponentMenu m{{250, 500}, {330}, {{true, 270}}, {100, 280}, {960, 1920, 4800}};
    const auto all = enumerate(m);
    EXPECT_EQ(all.size(), 2u * 1 * 1 * 2 * 3);
    for (const auto& c : all) {
        EXPECT_GT(c.pv_kw, 0.0);
        EXPECT_GT(c.diesel_kw, 0.0);
        EXPECT_GT(c.battery_kwh, 0.0);
    }
}

TEST(Enumerate, RejectsEmptyOptionSet) {
    const ComponentMenu m{{500}, {}, {{false, 0}}, {0}, {0}};
    EXPECT_THROW(enumerate(m), InvalidParameter);
}

TEST(DiscardRules, Reasons) {
    EXPECT_EQ(discard_reason({0, 0, true, 270, 0, 0}).value_or(""), "no renewable generation");
    EXPECT_EQ(discard_reason({500, 0, true, 270, 280, 0}).value_or(""), "generator redundant with grid");
    EXPECT_FALSE(discard_reason({500, 330, false, 0, 0, 4800}).has_value());
    // No renewables takes precedence when both rules apply.
    EXPECT_EQ(discard_reason({0, 0, true, 270, 280, 0}).value_or(""), "no renewable generation");
}

TEST(DiscardRules, OrderIndependentAndIdempotent) {
    auto all = enumerate(valencia().menu);
    const auto first = apply_discard_rules(all);
    EXPECT_EQ(first.retained.size() + first.discarded.size(), all.size());
    const auto again = apply_discard_rules(first.retained);
    EXPECT_EQ(again.retained, first.retained);
    EXPECT_TRUE(again.discarded.empty());

    std::mt19937 rng(3);
    std::shuffle(all.begin(), all.end(), rng);
    const auto shuffled = apply_discard_rules(all);
    ASSERT_EQ(shuffled.retained.size(), first.retained.size());
    for (const auto& c : shuffled.retained) EXPECT_TRUE(contains(first.retained, c));
}

TEST(BuildCandidates, PartitionAndOrdering) {
    const auto& set = valencia_candidates();
    EXPECT_EQ(set.candidates.size() + set.discarded.size(), 80u);
    for (std::size_t i = 1; i < set.candidates.size(); ++i) {
        const auto& a = set.candidates[i - 1];
        const auto& b = set.candidates[i];
        EXPECT_TRUE(a.npc < b.npc || (a.npc == b.npc && a.config.label() <= b.config.label()));
    }
    for (const auto& c : set.candidates) EXPECT_LE(c.ledger.shortage_fraction(), 0.10);
}

TEST(BuildCandidates, AllSelectedOptionsSurvive) {
    const auto& set = valencia_candidates();
    std::vector<Configuration> kept;
    for (const auto& c : set.candidates) kept.push_back(c.config);
    for (const auto& r : kSelected) EXPECT_TRUE(contains(kept, cfg_of(r))) << "option " << r.option << " " << cfg_of(r).label();
}

TEST(BuildCandidates, StaticDiscardsCarryTheirReasons) {
    for (const auto& d : valencia_candidates().discarded) {
        if (!d.config.has_renewables()) {
            EXPECT_EQ(d.reason, kReasonNoRenewables);
            EXPECT_FALSE(d.shortage.has_value());
        } else if (d.config.grid_connected && d.config.diesel_kw > 0) {
            EXPECT_EQ(d.reason, kReasonRedundantGenerator);
        } else {
            ASSERT_TRUE(d.shortage.has_value());
            EXPECT_GT(*d.shortage, 0.10);
            EXPECT_NE(d.reason.find("capacity shortage"), std::string::npos);
        }
    }
}

TEST(BuildCandidates, SingleInfeasibleConfiguration) {
    auto in = predesign_inputs(valencia(), daily_demand(valencia()));
    const ComponentMenu m{{0}, {330}, {{false, 0}}, {0}, {0}};  // wind only: far short of demand
    const auto set = build_candidates(m, in);
    EXPECT_TRUE(set.candidates.empty());
    ASSERT_EQ(set.discarded.size(), 1u);
    EXPECT_GT(set.discarded[0].shortage.value_or(0.0), 0.10);
}

TEST(BuildCandidates, BatterySizeOnlyChangesCost) {
    // PV exactly matches a flat demand: the battery never moves, so NPC differs only by battery cost.
    PredesignInputs in;
    in.demand.kw.assign(48, 50.0);
    in.pv_shape = {std::vector<double>(48, 50.0), 50.0};
    in.wind_shape = {std::vector<double>(48, 0.0), 0.0};
    const ComponentMenu m{{50}, {0}, {{false, 0}}, {0}, {1920, 960}};
    const auto set = build_candidates(m, in);
    ASSERT_EQ(set.candidates.size(), 2u);
    EXPECT_EQ(set.candidates[0].config.battery_kwh, 960.0);
    EXPECT_EQ(set.candidates[1].config.battery_kwh, 1920.0);
    oracle::Stack extra;
    extra.investment = 950.0 * 160;
    extra.recurring = 10.0 * 160;
    EXPECT_NEAR(set.candidates[1].npc - set.candidates[0].npc, oracle::present_value(extra), 1e-6);
}

TEST(BuildCandidates, SimulationErrorsNameTheConfiguration) {
    PredesignInputs in;
    in.demand.kw.assign(24, 10.0);
    in.pv_shape = {std::vector<double>(12, 1.0), 1.0};  // wrong length
    in.wind_shape = {std::vector<double>(24, 0.0), 0.0};
    const ComponentMenu m{{50}, {0}, {{false, 0}}, {0}, {0}};
    try {
        build_candidates(m, in);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("PV50"), std::string::npos) << e.what();
    }
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 4);
    EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}
