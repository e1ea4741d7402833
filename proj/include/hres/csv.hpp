#pragma once

// Minimal CSV support for the flat numeric tables this project reads and writes.
// Lines starting with '#' are comments (used for provenance stamps).

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hres/error.hpp"

namespace hres::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
            cell.remove_suffix(1);
        out.emplace_back(cell);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// Parses CSV text. `min_columns` is enforced on the header and every data row.
inline Table parse(std::istream& in, std::size_t min_columns) {
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line);
        if (!have_header) {
            if (cells.size() < min_columns) throw FormatError("header row has too few columns");
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() < min_columns) throw FormatError("too few columns", t.rows.size() + 1);
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw FormatError("missing header row");
    return t;
}

inline Table read_file(const std::string& path, std::size_t min_columns) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    try {
        return parse(in, min_columns);
    } catch (const FormatError& e) {
        throw e.prefixed(path + ": ");
    }
}

inline double parse_number(std::string_view cell, std::size_t row) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw FormatError("not a number: '" + std::string(cell) + "'", row);
    return v;
}

/// Shortest text that round-trips the value; used for every numeric CSV cell.
inline std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace hres::csv
