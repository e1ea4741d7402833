#pragma once

// Weighted-sum merit figure over the five criteria and the resulting ranking.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "hres/criteria.hpp"
#include "hres/csv.hpp"
#include "hres/dispatch.hpp"
#include "hres/error.hpp"

namespace hres {

/// Weights in criterion order EmR, ReG, EcF, SS, ESA.
struct WeightVector {
    std::array<double, 5> w{0.2, 0.2, 0.2, 0.2, 0.2};

    void validate() const {
        double sum = 0.0;
        for (double x : w) {
            detail::require(x >= 0.0 && std::isfinite(x), "weights must be finite and non-negative");
            sum += x;
        }
        detail::require(std::abs(sum - 1.0) <= 1e-9, "weights must sum to 1");
    }

    /// Parses "a,b,c,d,e".
    static WeightVector parse(std::string_view text) {
        WeightVector out;
        const auto parts = csv::split(text);
        detail::require(parts.size() == 5, "expected five comma-separated weights");
        for (std::size_t i = 0; i < 5; ++i) {
            try {
                out.w[i] = csv::parse_number(parts[i], 0);
            } catch (const FormatError&) {
                throw InvalidParameter("invalid weight '" + parts[i] + "'");
            }
        }
        out.validate();
        return out;
    }
};

inline double merit_figure(const CriteriaScores& s, const WeightVector& weights) {
    weights.validate();
    const auto v = s.as_array();
    double cp = 0.0;
    for (std::size_t i = 0; i < 5; ++i) cp += weights.w[i] * v[i];
    return cp;
}

struct ScoredDesign {
    Configuration config;
    std::string label;
    double npc = 0.0;
    CriteriaScores scores;
    double lcoe = 0.0;
};

struct RankedDesign {
    ScoredDesign design;
    double cp = 0.0;
    int rank = 0;
};

/// Descending CP; ties go to the lower NPC, then the lexicographically smaller label.
inline std::vector<RankedDesign> rank(const std::vector<ScoredDesign>& designs, const WeightVector& weights) {
    detail::require(!designs.empty(), "nothing to rank");
    weights.validate();
    std::vector<RankedDesign> out;
    out.reserve(designs.size());
    for (const auto& d : designs) out.push_back({d, merit_figure(d.scores, weights), 0});
    std::sort(out.begin(), out.end(), [](const RankedDesign& a, const RankedDesign& b) {
        if (a.cp != b.cp) return a.cp > b.cp;
        if (a.design.npc != b.design.npc) return a.design.npc < b.design.npc;
        return a.design.label < b.design.label;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
    return out;
}

/// Fraction rendered as a percent with half-up rounding, e.g. 0.888250 -> "88.83".
inline std::string format_percent(double fraction, int decimals = 2) {
    const double scale = std::pow(10.0, decimals);
    const double scaled = fraction * 100.0 * scale;
    // nudge values sitting on a representation boundary (x.xx4999...) up to the half
    const double rounded = std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, std::abs(scaled)));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded / scale);
    return buf;
}

}  // namespace hres
