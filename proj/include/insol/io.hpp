#pragma once

// File formats: comma/period CSV with RFC-4180 quoting, payoff-matrix and
// equilibria tables, and the JSON run manifest written next to every output.
// Machine files carry 17 significant digits so doubles round-trip exactly;
// human tables round to 2 decimals.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "insol/bimatrix.hpp"
#include "insol/exante.hpp"

namespace insol {

inline constexpr const char* version_string = "1.0.0";

inline std::string fmt_machine(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_human(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) os << ',';
        os << csv_escape(cells[k]);
    }
    os << '\n';
}

// quoted fields, doubled quotes, CRLF or LF; no trailing-newline row
inline std::vector<std::vector<std::string>> read_csv(std::istream& is) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (int ci; (ci = is.get()) != EOF;) {
        const char c = static_cast<char>(ci);
        if (quoted) {
            if (c == '"') {
                if (is.peek() == '"') {
                    field += '"';
                    is.get();
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; any = true; break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r': break;
            case '\n':
                if (any || !field.empty() || !row.empty()) {
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                    any = false;
                }
                break;
            default: field += c; any = true; break;
        }
    }
    if (quoted) throw std::runtime_error("read_csv: unterminated quoted field");
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("expected a number, got '" + s + "'");
    return v;
}

// header: capital,<level...>; one row per level with the row player's payoffs
inline void write_payoff_matrix_csv(std::ostream& os, const payoff_matrix& m,
                                    bool machine = true) {
    auto fmt = machine ? fmt_machine : fmt_human;
    std::vector<std::string> head{"capital"};
    for (double c : m.capital_levels) head.push_back(fmt(c));
    write_csv_row(os, head);
    for (std::size_t i = 0; i < m.size(); ++i) {
        std::vector<std::string> row{fmt(m.capital_levels[i])};
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(fmt(m.at(i, j)));
        write_csv_row(os, row);
    }
}

inline payoff_matrix read_payoff_matrix_csv(std::istream& is) {
    const auto rows = read_csv(is);
    if (rows.size() < 3 || rows.front().size() != rows.size())
        throw std::runtime_error("payoff matrix csv: need a square table with a header");
    if (rows.front().front() != "capital")
        throw std::runtime_error("payoff matrix csv: missing 'capital' header");
    payoff_matrix m;
    const std::size_t n = rows.size() - 1;
    for (std::size_t j = 0; j < n; ++j) m.capital_levels.push_back(parse_double(rows[0][j + 1]));
    m.cells.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i + 1].size() != n + 1)
            throw std::runtime_error("payoff matrix csv: ragged row");
        if (parse_double(rows[i + 1][0]) != m.capital_levels[i])
            throw std::runtime_error("payoff matrix csv: row label mismatch");
        for (std::size_t j = 0; j < n; ++j) m.cells.push_back(parse_double(rows[i + 1][j + 1]));
    }
    return m;
}

inline const char* type_name(eq_type t) {
    switch (t) {
        case eq_type::type1: return "type1";
        case eq_type::type2: return "type2";
        default: return "type3";
    }
}

// published-table layout: capital levels down the side, one weight-column
// pair per equilibrium, payoff and type footer rows
inline void write_equilibria_csv(std::ostream& os, const std::vector<double>& capital_levels,
                                 const std::vector<mixed_equilibrium>& eqs,
                                 bool machine = true) {
    auto fmt = machine ? fmt_machine : fmt_human;
    std::vector<std::string> head{"capital"};
    for (std::size_t k = 0; k < eqs.size(); ++k) {
        head.push_back("eq" + std::to_string(k + 1) + "_row");
        head.push_back("eq" + std::to_string(k + 1) + "_col");
    }
    write_csv_row(os, head);
    for (std::size_t i = 0; i < capital_levels.size(); ++i) {
        std::vector<std::string> row{fmt(capital_levels[i])};
        for (const auto& eq : eqs) {
            row.push_back(fmt(eq.strategy_row.at(i)));
            row.push_back(fmt(eq.strategy_col.at(i)));
        }
        write_csv_row(os, row);
    }
    std::vector<std::string> pay{"payoff"};
    std::vector<std::string> typ{"type"};
    for (const auto& eq : eqs) {
        pay.push_back(fmt(eq.payoff_row));
        pay.push_back(fmt(eq.payoff_col));
        typ.push_back(type_name(eq.type));
        typ.push_back("");
    }
    write_csv_row(os, pay);
    write_csv_row(os, typ);
}

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// every run writes <stem>.manifest.json next to its outputs; the data files
// themselves stay timestamp-free so reruns are byte-identical
inline nlohmann::json make_manifest(const std::string& command, const nlohmann::json& parameters,
                                    const std::vector<std::string>& outputs,
                                    std::optional<std::uint64_t> seed = std::nullopt) {
    nlohmann::json m;
    m["command"] = command;
    m["parameters"] = parameters;
    m["version"] = version_string;
    m["timestamp"] = utc_timestamp();
    m["outputs"] = outputs;
    if (seed) m["seed"] = *seed;
    return m;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline std::string manifest_path_for(const std::string& out_stem) {
    return out_stem + ".manifest.json";
}

}  // namespace insol
