// model.hpp: Harmonic networks, Ohmic reservoirs and the thermal functions every solver consumes

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "heatrect/errors.hpp"

namespace heatrect {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Units: hbar = k_B = 1, frequencies in units of omega_ref, temperatures in hbar*omega_ref/k_B.
struct Units {
    double omega_ref{1.0};
};

// System Hamiltonian P^T M^-1 P / 2 + X^T V(t) X / 2 with V(t) = V0 + sum_k V_k exp(i k omega_d t).
class NetworkSpec {
public:
    NetworkSpec() = default;

    // Static network.
    NetworkSpec(Vector masses, Matrix v0);

    // Driven network. Harmonics are keyed by k != 0 and must come in pairs with
    // V_{-k} = V_k^dagger and V_k = V_k^T, so that V(t) stays real symmetric.
    NetworkSpec(Vector masses, Matrix v0, std::map<int, CMatrix> harmonics, double omega_d);

    std::size_t size() const noexcept { return static_cast<std::size_t>(v0_.rows()); }
    const Vector& masses() const noexcept { return masses_; }
    const Matrix& v0() const noexcept { return v0_; }
    const std::map<int, CMatrix>& harmonics() const noexcept { return harmonics_; }
    std::optional<double> omega_d() const noexcept { return omega_d_; }

    bool driven() const noexcept { return omega_d_.has_value(); }
    double period() const;
    int max_harmonic() const noexcept;

    // V_k for any k; zero matrix when k is not stored. k = 0 returns V0.
    CMatrix harmonic(int k) const;

    // Reconstructed real potential V(t) and its time derivative.
    Matrix potential(double t) const;
    Matrix potential_rate(double t) const;

private:
    void validate() const;

    Vector masses_;
    Matrix v0_;
    std::map<int, CMatrix> harmonics_;
    std::optional<double> omega_d_;
};

// Ohmic reservoir with Lorentz-Drude cutoff coupled to a single node.
struct BathSpec {
    int node{0};
    double temperature{1.0};
    double gamma{0.01};
    double cutoff{10.0};
};

class Model {
public:
    Model() = default;
    Model(NetworkSpec network, std::vector<BathSpec> baths, Units units = {});

    const NetworkSpec& network() const noexcept { return network_; }
    const std::vector<BathSpec>& baths() const noexcept { return baths_; }
    const Units& units() const noexcept { return units_; }
    std::size_t size() const noexcept { return network_.size(); }
    std::size_t bath_count() const noexcept { return baths_.size(); }

    // Same geometry and drive, new bath temperatures (one per bath).
    Model with_temperatures(const std::vector<double>& temperatures) const;

    // Reversed configuration: temperatures of baths a and b exchanged.
    Model swapped(std::size_t a = 0, std::size_t b = 1) const;

    // Same network and baths driven at a different frequency.
    Model with_omega_d(double omega_d) const;

    Vector temperatures() const;
    double max_cutoff() const noexcept;
    double min_gamma() const noexcept;

private:
    NetworkSpec network_;
    std::vector<BathSpec> baths_;
    Units units_;
};

// Bose-Einstein occupation n(omega) = 1 / (exp(omega/T) - 1), odd-extended through
// n(-omega) = -(n(omega) + 1). Throws DomainError at omega = 0.
template <typename Scalar>
Scalar occupation(Scalar temperature, Scalar omega) {
    if (omega == Scalar(0)) throw DomainError("occupation: omega = 0 is a pole");
    if (temperature < Scalar(0)) throw DomainError("occupation: negative temperature");
    if (temperature == Scalar(0)) return omega > Scalar(0) ? Scalar(0) : Scalar(-1);
    // expm1 saturates to inf (n -> 0) or -1 (n -> -1) without overflow traps.
    return Scalar(1) / std::expm1(omega / temperature);
}

// d n / d T at fixed omega.
template <typename Scalar>
Scalar occupation_temperature_derivative(Scalar temperature, Scalar omega) {
    if (omega == Scalar(0)) throw DomainError("occupation derivative: omega = 0 is a pole");
    if (!(temperature > Scalar(0))) return Scalar(0);
    const Scalar x = omega / temperature;
    if (std::abs(x) > Scalar(700)) return Scalar(0);
    const Scalar em = std::expm1(x);
    return x / temperature * (em + Scalar(1)) / (em * em);
}

// Scalar Ohmic density J(omega) = 2 gamma omega Lambda^2 / (pi (omega^2 + Lambda^2)); odd in omega.
template <typename Scalar>
Scalar ohmic_density(Scalar gamma, Scalar cutoff, Scalar omega) {
    return Scalar(2) * gamma * omega * cutoff * cutoff / (Scalar(pi) * (omega * omega + cutoff * cutoff));
}

inline double ohmic_density(const BathSpec& bath, double omega) {
    return ohmic_density(bath.gamma, bath.cutoff, omega);
}

// chi(omega) = 2 gamma Lambda^2 / (Lambda - i omega); Im chi = pi J.
std::complex<double> susceptibility(const BathSpec& bath, double omega);

// J(omega) = sum_alpha Pi_alpha J_alpha(omega) as an N x N diagonal matrix.
Matrix spectral_matrix(const Model& model, double omega);

// Per-node scalar densities (zero where no bath is attached).
Vector node_densities(const Model& model, double omega);

// Two oscillators with a drive 2 v1 cos(omega_d t) on node 0 and identical baths on both nodes.
struct TwoOscillatorParams {
    double omega1{2.0};
    double omega2{1.0};
    double c0{0.2};
    double v1{0.1};
    std::optional<double> omega_d{};
    double gamma{0.01};
    double cutoff{10.0};
    double t1{1.2};
    double t2{1.0};

    Matrix v0() const;
    Model build() const;
};

} // namespace heatrect
