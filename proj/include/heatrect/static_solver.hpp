// static_solver.hpp: Static Green's function, heat-transfer matrix, normal modes and currents

#pragma once

#include <optional>
#include <vector>

#include "heatrect/currents.hpp"
#include "heatrect/model.hpp"

namespace heatrect {

struct GreenSample {
    double omega{0.0};
    CMatrix g;
    double condition{1.0};
};

// G0(omega) = (-omega^2 M + V0 - i pi J(omega))^-1, the real part of the bath
// susceptibility being absorbed in V0. Throws SingularityError when the estimated
// condition number exceeds condition_limit.
GreenSample green_static(const Model& model, double omega, double condition_limit = 1e12);

// Inverse static Green's function at omega.
CMatrix inverse_green_static(const Model& model, double omega);

// Closed form for two unit-mass oscillators with identical baths, using the normal-mode
// parametrisation u1 = (sin t, cos t), u2 = (cos t, -sin t), tan 2t = -2 c0 / (omega2^2 - omega1^2).
Eigen::Matrix2cd analytic_green_two_osc(double omega1, double omega2, double c0, double gamma, double cutoff,
                                        double omega);

struct NormalModes {
    Vector frequencies;           // ascending nu_i
    Matrix vectors;               // orthonormal columns of M^-1/2 V0 M^-1/2
    std::optional<double> theta;  // two-node mixing angle
};

NormalModes normal_modes(const NetworkSpec& network);
inline NormalModes normal_modes(const Model& model) { return normal_modes(model.network()); }

// Poles of G0 continued into the complex plane (roots of det G0^-1). All of them lie in the
// lower half-plane when every normal mode is damped.
CVector static_poles(const Model& model);

// Throws SingularityError when a pole of G0 sits on or above the real axis.
void check_static_poles(const Model& model);

// Static transfer matrix indexed by bath pairs. Off-diagonal entries come from
// pi omega tr[J_a G0 J_b G0^dagger]; the diagonal is fixed by zero row sums.
Matrix transfer_static(const Model& model, double omega);

// Same off-diagonal entries with the diagonal taken from the trace formula (alpha = beta).
Matrix transfer_static_trace(const Model& model, double omega);

// Breakpoints (positive half-axis) where the integrands are Lorentzian-peaked.
std::vector<double> resonance_breakpoints(const std::vector<double>& centres, double width, double omega_max);

double default_omega_max(const Model& model, int order);

// Steady-state currents of a static network. Each entry of temperature_sets is one full
// assignment of bath temperatures; the transfer matrix is shared between them.
std::vector<CurrentsReport> static_currents(const Model& model, const std::vector<Vector>& temperature_sets,
                                            const SolverOptions& opts = {});
CurrentsReport static_currents(const Model& model, const SolverOptions& opts = {});

} // namespace heatrect
