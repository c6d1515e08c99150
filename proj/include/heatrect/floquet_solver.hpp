// floquet_solver.hpp: Floquet amplitudes, dynamical transfer matrices and period-averaged currents

#pragma once

#include <vector>

#include "heatrect/currents.hpp"
#include "heatrect/model.hpp"

namespace heatrect {

// A_k(omega) for k in [-K, K].
struct FloquetAmplitudes {
    double omega{0.0};
    int order{0};
    std::vector<CMatrix> blocks;  // blocks[k + order]
    double residual{0.0};         // max over block rows of the Frobenius defect
    double condition{1.0};

    const CMatrix& a(int k) const { return blocks.at(static_cast<std::size_t>(k + order)); }
    CMatrix& a(int k) { return blocks.at(static_cast<std::size_t>(k + order)); }
};

int default_floquet_order(const Model& model);

// Assembles the (2K+1)N block system G0^-1(omega - k omega_d) A_k + sum_{j!=0} V_j A_{k-j} = delta_k0
// in the ordering k = -K..K.
CMatrix floquet_system(const Model& model, double omega, int order);

// Solves for every column of every A_k. Throws SingularityError when the block system's
// estimated condition number exceeds condition_limit.
FloquetAmplitudes solve_amplitudes(const Model& model, double omega, int order, double condition_limit = 1e10);

// Block-row defect of amplitudes against the truncated system.
double amplitude_residual(const Model& model, const FloquetAmplitudes& amps);

// Low-order expansion in the drive (harmonics +-1 only): A_{+-1} to first order and A_0 to
// second order.
FloquetAmplitudes perturbative_amplitudes(const Model& model, double omega);

struct DynamicTransferSample {
    double omega{0.0};
    Matrix t;                  // t(beta, alpha) = T_{beta alpha}; diagonal completed from t_tilde
    Vector t_tilde;            // T~_alpha
    std::vector<Matrix> rates; // rates[k + order](beta, alpha) = r^k_{beta alpha}
    int order{0};
    double condition{1.0};

    const Matrix& rate(int k) const { return rates.at(static_cast<std::size_t>(k + order)); }
};

struct DynamicTransferSet {
    std::vector<double> grid;
    std::vector<DynamicTransferSample> samples;
    int order{0};
};

DynamicTransferSample dynamic_transfer(const Model& model, double omega, int order, double condition_limit = 1e10);
DynamicTransferSet dynamic_transfer(const Model& model, const std::vector<double>& grid, int order,
                                    double condition_limit = 1e10);

// Period-averaged heat currents and work rates for each temperature assignment. The Floquet
// amplitudes do not depend on temperature and are shared across the sets. Static models are
// accepted and reduce to the static currents.
std::vector<CurrentsReport> averaged_currents(const Model& model, const std::vector<Vector>& temperature_sets,
                                              const SolverOptions& opts = {});
CurrentsReport averaged_currents(const Model& model, const SolverOptions& opts = {});

} // namespace heatrect
