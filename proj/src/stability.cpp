// stability.cpp: Monodromy proxy and spectral probe

#include "heatrect/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "heatrect/floquet_solver.hpp"
#include "heatrect/static_solver.hpp"

namespace heatrect {

namespace {

int default_steps(const Model& model) {
    const double nu_max = normal_modes(model).frequencies.maxCoeff();
    const double tau = model.network().period();
    return std::max(256, static_cast<int>(std::ceil(40.0 * std::max(nu_max, 1e-3) * tau)));
}

} // namespace

Matrix monodromy(const Model& model, int steps) {
    const auto& net = model.network();
    const Eigen::Index n = static_cast<Eigen::Index>(net.size());
    Vector damping = Vector::Zero(n);
    for (const auto& b : model.baths()) damping[b.node] = 2.0 * b.gamma;
    const Vector minv = net.masses().cwiseInverse();

    auto rhs = [&](double t, const Matrix& y) {
        Matrix dy(2 * n, y.cols());
        const auto x = y.topRows(n);
        const auto p = y.bottomRows(n);
        dy.topRows(n) = minv.asDiagonal() * p;
        dy.bottomRows(n) = -net.potential(t) * x - damping.asDiagonal() * (minv.asDiagonal() * p);
        return dy;
    };

    const double tau = net.period();
    const double h = tau / steps;
    Matrix y = Matrix::Identity(2 * n, 2 * n);
    for (int s = 0; s < steps; ++s) {
        const double t = s * h;
        const Matrix k1 = rhs(t, y);
        const Matrix k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        const Matrix k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        const Matrix k4 = rhs(t + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

StabilityReport stability_check(const Model& model, const StabilityOptions& opts) {
    StabilityReport rep;
    if (!model.network().driven()) {
        rep.reason = "static";
        return rep;
    }

    const int steps = opts.steps_per_period > 0 ? opts.steps_per_period : default_steps(model);
    const Matrix mono = monodromy(model, steps);
    rep.max_multiplier = Eigen::EigenSolver<Matrix>(mono, false).eigenvalues().cwiseAbs().maxCoeff();
    rep.proxy_unstable = rep.max_multiplier > 1.0 + opts.multiplier_tol;

    const NormalModes nm = normal_modes(model);
    const double wd = *model.network().omega_d();
    const int order = default_floquet_order(model);
    const double omega_max = default_omega_max(model, order);
    std::vector<double> probes;
    for (int i = 1; i <= opts.probes; ++i) probes.push_back(omega_max * (i - 0.5) / opts.probes);
    probes.push_back(0.5 * wd);
    for (Eigen::Index i = 0; i < nm.frequencies.size(); ++i) {
        const double nu = nm.frequencies[i];
        for (double w : {nu, std::abs(nu - wd), nu + wd, std::abs(nu - 0.5 * wd)})
            if (w > 0.0) probes.push_back(w);
    }
    for (double w : probes) {
        const CMatrix sys = floquet_system(model, w, order);
        const CMatrix inv = sys.partialPivLu().inverse();
        double cond = sys.cwiseAbs().colwise().sum().maxCoeff() * inv.cwiseAbs().colwise().sum().maxCoeff();
        if (!std::isfinite(cond)) cond = std::numeric_limits<double>::infinity();
        if (cond > rep.max_condition) {
            rep.max_condition = cond;
            rep.worst_probe = w;
        }
    }
    rep.spectral_unstable = rep.max_condition > opts.condition_limit;

    rep.stable = !rep.proxy_unstable && !rep.spectral_unstable;
    if (rep.proxy_unstable)
        rep.reason = "unstable_multiplier";
    else if (rep.spectral_unstable)
        rep.reason = "unstable_spectral";
    return rep;
}

} // namespace heatrect
