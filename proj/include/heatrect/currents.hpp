// currents.hpp: Solver options and the steady-state currents record shared by both spectral solvers

#pragma once

#include <optional>
#include <vector>

namespace heatrect {

struct SolverOptions {
    double rel_tol{1e-7};
    double abs_tol{1e-300};
    int max_intervals{200000};
    // Upper integration limit; derived from the model when unset.
    std::optional<double> omega_max{};
    // Integrate over omega > 0 only, using the reflection symmetry of the integrands.
    bool fold{true};

    // Floquet truncation. Default is (largest stored harmonic) + 3.
    std::optional<int> floquet_order{};
    bool auto_escalate{true};
    int max_floquet_order{12};
    double order_tol{1e-6};

    double static_condition_limit{1e12};
    double floquet_condition_limit{1e10};
};

// Steady-state (period-averaged when driven) energy balance. Sign convention: positive
// heat means energy flowing from the bath into the network.
struct CurrentsReport {
    std::vector<double> temperatures;
    std::vector<double> heat;        // Q_alpha
    std::vector<double> local_work;  // W_alpha, all zero for static networks
    double work{0.0};                // W = sum_alpha W_alpha
    double first_law_residual{0.0};  // sum_alpha Q_alpha + W
    double quadrature_error{0.0};
    double tail_bound{0.0};
    double omega_max{0.0};
    double max_condition{0.0};
    int evaluations{0};
    int floquet_order{0};
    bool order_converged{true};
    bool driven{false};
};

} // namespace heatrect
