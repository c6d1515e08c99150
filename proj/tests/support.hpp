// support.hpp: Shared fixtures for the test binaries

#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "heatrect/model.hpp"

namespace heatrect::testing {

// Random static network with n nodes, positive spectrum in [lo, hi] and `baths` baths on distinct
// random nodes. Masses random in [0.5, 2] unless unit_masses.
inline Model random_static_model(std::mt19937_64& rng, int n, int baths, bool unit_masses = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Eigen::Index N = n;
    Matrix q = Matrix::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) q(i, j) = u(rng) - 0.5;
    const Eigen::HouseholderQR<Matrix> qr(q);
    const Matrix rot = qr.householderQ();
    Vector eig(N);
    for (Eigen::Index i = 0; i < N; ++i) eig[i] = 0.5 + 4.0 * u(rng);
    Matrix v0 = rot * eig.asDiagonal() * rot.transpose();
    v0 = 0.5 * (v0 + v0.transpose());
    Vector masses = Vector::Ones(N);
    if (!unit_masses)
        for (Eigen::Index i = 0; i < N; ++i) masses[i] = 0.5 + 1.5 * u(rng);

    std::vector<int> nodes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) nodes[static_cast<std::size_t>(i)] = i;
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::vector<BathSpec> bs;
    for (int b = 0; b < baths; ++b) {
        BathSpec s;
        s.node = nodes[static_cast<std::size_t>(b)];
        s.temperature = 0.3 + 1.7 * u(rng);
        s.gamma = 0.005 + 0.05 * u(rng);
        s.cutoff = 5.0 + 10.0 * u(rng);
        bs.push_back(s);
    }
    return Model(NetworkSpec(masses, v0), bs);
}

inline TwoOscillatorParams paper_params(std::optional<double> omega_d = std::nullopt) {
    TwoOscillatorParams p;
    p.omega_d = omega_d;
    return p;
}

} // namespace heatrect::testing
