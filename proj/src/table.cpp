// table.cpp: CSV/JSON rendering

#include "heatrect/table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "heatrect/errors.hpp"

namespace heatrect {

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw ValidationError("table: row has " + std::to_string(row.size()) + " cells, expected " +
                              std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

std::string format_number(double v, int precision) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::string format_cell(const Cell& c, int precision) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d, precision);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "1" : "0";
    return std::get<std::string>(c);
}

void write_csv(std::ostream& os, const ResultTable& t, int precision) {
    for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_cell(r[i], precision);
        os << "\n";
    }
}

nlohmann::json table_json(const ResultTable& t) {
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [k, v] : t.metadata) meta[k] = v;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& c : r) {
            if (const auto* d = std::get_if<double>(&c))
                row.push_back(std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(nullptr));
            else if (const auto* i = std::get_if<long long>(&c))
                row.push_back(*i);
            else if (const auto* b = std::get_if<bool>(&c))
                row.push_back(*b);
            else
                row.push_back(std::get<std::string>(c));
        }
        rows.push_back(row);
    }
    return {{"metadata", meta}, {"columns", t.columns}, {"rows", rows}};
}

} // namespace heatrect
