#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "annealed_ldp/errors.hpp"

#include <json.hpp>

namespace annealed_ldp {

// Tabular output shared by every CLI command: '#'-prefixed metadata lines,
// a header row, then comma-separated doubles at 17 significant digits so a
// round trip through text is lossless.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << t.columns[c] << (c + 1 < t.columns.size() ? "," : "");
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << format_double(row[c]) << (c + 1 < row.size() ? "," : "");
        os << "\n";
    }
}

inline void write_json(std::ostream& os, const Table& t) {
    nlohmann::json j;
    j["meta"] = nlohmann::json::object();
    for (const auto& [k, v] : t.meta) j["meta"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) j["rows"].push_back(row);
    os << j.dump(2) << "\n";
}

// Parser for the tool's own CSV output (metadata map + columns + numeric rows).
inline Table read_csv(std::istream& is) {
    Table t;
    std::string line;
    bool header_done = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                std::string key = line.substr(1, colon - 1);
                std::string val = line.substr(colon + 1);
                auto trim = [](std::string& s) {
                    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
                    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
                };
                trim(key);
                trim(val);
                t.meta.emplace_back(key, val);
            }
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ss, cell, ',')) {
                if (!cell.empty() && cell.back() == '\r') cell.pop_back();
                t.columns.push_back(cell);
            }
            header_done = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Writes via a sibling temp file and a rename, so readers never observe a
// half-written table. path "-" means stdout.
template <class WriteFn>
void atomic_write(const std::string& path, WriteFn&& fn) {
    if (path == "-" || path.empty()) {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp);
        if (!os) throw validation_error("cannot open output path: " + tmp.string());
        fn(os);
        if (!os) throw validation_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw validation_error("cannot move output into place: " + target.string());
    }
}

// Grid syntax: "start:stop:step" (endpoints inclusive within half a step),
// a comma list, or a single value.
inline std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double a, b, s;
        char c1, c2;
        std::stringstream ss(spec);
        if (!(ss >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || !(s > 0.0))
            throw validation_error("bad grid spec: " + spec);
        const long steps = static_cast<long>(std::floor((b - a) / s + 0.5 + 1e-12));
        for (long k = 0; k <= steps; ++k) {
            const double v = a + static_cast<double>(k) * s;
            if (v > b + 0.5 * s) break;
            out.push_back(v);
        }
        if (out.empty()) throw validation_error("empty grid: " + spec);
        return out;
    }
    std::stringstream ss(spec);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) throw validation_error("bad number in grid: " + cell);
        out.push_back(v);
    }
    if (out.empty()) throw validation_error("empty grid: " + spec);
    return out;
}

inline std::vector<long> parse_longs(const std::string& spec) {
    std::vector<long> out;
    std::stringstream ss(spec);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        out.push_back(std::strtol(cell.c_str(), nullptr, 10));
    }
    if (out.empty()) throw validation_error("empty integer list: " + spec);
    return out;
}

}  // namespace annealed_ldp
