// sweep.cpp: Grid construction and the worker pool driver

#include "heatrect/sweep.hpp"

#include <algorithm>

#include "heatrect/metrics.hpp"
#include "heatrect/parallel.hpp"

namespace heatrect {

std::vector<double> axis_values(const SweepAxis& axis) { return linspace(axis.start, axis.stop, axis.count); }

std::vector<std::vector<double>> grid_coordinates(const std::vector<SweepAxis>& axes) {
    std::vector<std::vector<double>> out{{}};
    for (const auto& ax : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : out)
            for (double v : axis_values(ax)) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        out = std::move(next);
    }
    return out;
}

std::string axis_column(const std::string& path) {
    std::string s = path.rfind("model.", 0) == 0 ? path.substr(6) : path;
    std::replace(s.begin(), s.end(), '.', '_');
    return s;
}

RunConfig config_at(const RunConfig& base, const std::vector<double>& coords) {
    if (coords.size() != base.sweep.axes.size()) throw ConfigError("sweep: coordinate count does not match axes");
    if (coords.empty()) return base;
    Json doc = to_json(base);
    for (std::size_t i = 0; i < coords.size(); ++i) set_path(doc, base.sweep.axes[i].path, coords[i]);
    return parse_config(doc);
}

ResultTable run_sweep(const RunConfig& base, const std::vector<std::string>& columns, const PointFunction& fn,
                      unsigned workers, const std::function<void(std::size_t, std::size_t)>& progress) {
    const auto grid = grid_coordinates(base.sweep.axes);
    // Resolve every point up front so config errors fail the whole sweep before any work starts.
    std::vector<RunConfig> configs;
    configs.reserve(grid.size());
    for (const auto& c : grid) configs.push_back(config_at(base, c));

    std::vector<std::vector<Cell>> cells(grid.size());
    parallel_for(
        grid.size(), workers, [&](std::size_t i) { cells[i] = fn(configs[i], grid[i]); }, progress);

    ResultTable t;
    for (const auto& ax : base.sweep.axes) t.columns.push_back(axis_column(ax.path));
    t.columns.insert(t.columns.end(), columns.begin(), columns.end());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<Cell> row(grid[i].begin(), grid[i].end());
        row.insert(row.end(), cells[i].begin(), cells[i].end());
        t.add_row(std::move(row));
    }
    return t;
}

} // namespace heatrect
