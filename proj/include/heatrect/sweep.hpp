// sweep.hpp: Parameter sweeps over dotted configuration paths

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "heatrect/config.hpp"
#include "heatrect/table.hpp"

namespace heatrect {

// Evenly spaced values of one axis, endpoints included.
std::vector<double> axis_values(const SweepAxis& axis);

// Row-major grid (first axis outer). No axes gives a single empty point.
std::vector<std::vector<double>> grid_coordinates(const std::vector<SweepAxis>& axes);

// "model.omega_d" -> "omega_d", "baths.2.temperature" -> "baths_2_temperature".
std::string axis_column(const std::string& path);

// Base config with every axis path set to the given coordinates, re-parsed strictly.
RunConfig config_at(const RunConfig& base, const std::vector<double>& coords);

using PointFunction = std::function<std::vector<Cell>(const RunConfig& point, const std::vector<double>& coords)>;

// Evaluates fn at every grid point on `workers` threads. Rows come back in grid order with the
// axis coordinates first, then the cells fn returns for `columns`.
ResultTable run_sweep(const RunConfig& base, const std::vector<std::string>& columns, const PointFunction& fn,
                      unsigned workers, const std::function<void(std::size_t, std::size_t)>& progress = {});

} // namespace heatrect
