// oracle.hpp: Discrete-bath (star model) time-domain reference for the spectral solvers

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "heatrect/currents.hpp"
#include "heatrect/model.hpp"

namespace heatrect {

// One reservoir resolved into explicit unit-mass oscillators on a midpoint grid.
struct BathModes {
    int node{0};
    double temperature{0.0};
    double d_omega{0.0};
    Vector omega;     // (mu - 1/2) d_omega
    Vector coupling;  // c_mu^2 = 2 omega_mu J(omega_mu) d_omega

    double recurrence_time() const;
    // sum_mu c_mu^2 / omega_mu^2, the static shift the discrete bath induces on its node.
    double counterterm() const;
};

// Throws ValidationError for m_modes < 50 and when the recurrence time 2 pi / d_omega is shorter
// than horizon (if given).
BathModes discretize_bath(const BathSpec& bath, int m_modes, double omega_max, double horizon = 0.0);

// Closed system + baths. The system potential carries the counterterm, so that the
// bath-renormalised static potential equals v0.
struct StarModel {
    NetworkSpec network;
    std::vector<BathModes> baths;
    Vector counterterm;  // per node

    std::size_t system_size() const { return network.size(); }
    std::size_t mode_count() const;
    std::size_t dimension() const { return 2 * (system_size() + mode_count()); }
    double recurrence_time() const;
    Matrix system_potential(double t) const;  // V(t) + counterterm
};

StarModel build_star(const Model& model, int m_modes, double omega_max, double horizon = 0.0);

enum class SystemInit { ground, thermal };

// Product initial state: system block (2N x 2N, ordering X, P) plus thermal bath diagonals.
struct InitialCovariance {
    Matrix system;
    std::vector<Vector> bath_xx;
    std::vector<Vector> bath_pp;
};

// Bath modes thermal at their temperatures; the system in the ground or thermal state of its
// own Hamiltonian (V0 plus counterterm). Symmetrised second moments, zero means.
InitialCovariance thermal_initial_covariance(const StarModel& star, SystemInit init = SystemInit::ground,
                                             double system_temperature = 0.0);

// Full covariance in the ordering (X, P, x_bath, p_bath). Only sensible for small star models.
Matrix dense_covariance(const StarModel& star, const InitialCovariance& sigma0);

struct PropagationSettings {
    double t_end{0.0};
    double dt{0.04};
    double transient{0.0};      // averaging starts here
    double sample_dt{0.25};     // static runs
    int samples_per_period{16}; // driven runs
    double positivity_tol{1e-8};
};

struct OracleTrajectory {
    std::vector<double> times;
    std::vector<Matrix> sigma_xx, sigma_xp, sigma_pp;
    std::vector<Vector> currents_commutator;  // Q_alpha(t) = <P_a u_alpha>_sym / m_a
    std::vector<Vector> currents_bath_energy; // Q'_alpha(t) = -d<H_R_alpha>/dt
    std::vector<double> work_rate;            // (1/2) tr[dV/dt sigma_XX]
    std::vector<double> system_energy;        // <H_S> with the counterterm included

    Vector average_commutator;
    Vector average_bath_energy;
    double average_work{0.0};
    double window_start{0.0};
    double window_end{0.0};
    double window_variation{0.0};  // relative difference between the two window halves
    double min_positivity{0.0};    // smallest eigenvalue of sigma + i Omega / 2 over all samples
};

// Heisenberg propagation of the observable rows X, P, u_alpha = sum c x, v_alpha = sum c p with
// a fourth-order symplectic splitting (exact free rotation, position kicks). Driven networks
// are sampled samples_per_period times per period and averaged over whole periods.
OracleTrajectory propagate(const StarModel& star, const InitialCovariance& sigma0, const PropagationSettings& settings);

// Same dynamics for the full covariance matrix; returns it at t_end. Small models only.
Matrix propagate_dense(const StarModel& star, const Matrix& sigma0, double t_end, double dt);

// One-step propagator of the full phase space (small models only).
Matrix step_propagator(const StarModel& star, double t0, double dt);

struct OracleSettings {
    int modes_per_bath{0};      // 0 derives the count from the horizon
    double bath_omega_max{0.0}; // 0 picks max(12, 4 (nu_max + omega_d)) capped at 3 Lambda
    double dt{0.04};
    double transient{0.0};      // 0 means 5 / gamma_min
    double window{0.0};         // 0 means max(20 periods, 1 / gamma_min)
    int samples_per_period{16};
    double sample_dt{0.25};
    SystemInit init{SystemInit::thermal};
    std::optional<double> init_temperature{};  // default: mean bath temperature
    double recurrence_margin{1.05};
};

struct OracleComparison {
    std::vector<double> spectral;
    std::vector<double> commutator;
    std::vector<double> bath_energy;
    double oracle_work{0.0};
    double spectral_work{0.0};
    double deviation_spectral{0.0};     // max_alpha |Q_or - Q_sp| / max_alpha |Q_sp|
    double deviation_definitions{0.0};  // max_alpha |Q - Q'| / max_alpha |Q|
    std::vector<double> relative_per_bath; // |Q_or - Q_sp| / |Q_sp| per bath
    bool inconclusive{false};
    double window_variation{0.0};
    int modes_per_bath{0};
    double bath_omega_max{0.0};
    double t_end{0.0};
    double recurrence_time{0.0};
    OracleTrajectory trajectory;
};

// Resolves defaults against the model (mode count, horizon, bath cutoff).
OracleSettings resolve_oracle_settings(const Model& model, const OracleSettings& settings);

OracleComparison oracle_compare(const Model& model, const CurrentsReport& spectral, const OracleSettings& settings = {});

// time, Q_alpha, Q'_alpha, W, <H_S>, sigma_XX diagonal.
void write_trajectory_csv(std::ostream& os, const OracleTrajectory& traj);

} // namespace heatrect
