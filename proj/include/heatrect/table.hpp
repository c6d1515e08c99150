// table.hpp: Row-oriented result tables with deterministic CSV/JSON rendering

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace heatrect {

using Cell = std::variant<double, long long, bool, std::string>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    // Written as "# key: value" lines before the CSV header and as a "metadata" object in JSON.
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_row(std::vector<Cell> row);  // throws ValidationError on a column-count mismatch
};

// printf "%.<precision>g"; nan, inf and -inf spelled out.
std::string format_number(double v, int precision = 12);
std::string format_cell(const Cell& c, int precision = 12);

void write_csv(std::ostream& os, const ResultTable& t, int precision = 12);
nlohmann::json table_json(const ResultTable& t);

} // namespace heatrect
