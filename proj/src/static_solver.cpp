// static_solver.cpp: Static spectral solver

#include "heatrect/static_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "heatrect/quadrature.hpp"

namespace heatrect {

CMatrix inverse_green_static(const Model& model, double omega) {
    const auto& net = model.network();
    CMatrix z = (net.v0() - omega * omega * Matrix(net.masses().asDiagonal())).cast<Complex>();
    for (const auto& b : model.baths()) z(b.node, b.node) -= Complex(0.0, pi * ohmic_density(b, omega));
    return z;
}

GreenSample green_static(const Model& model, double omega, double condition_limit) {
    const CMatrix z = inverse_green_static(model, omega);
    CMatrix g = z.partialPivLu().inverse();
    double cond = z.cwiseAbs().colwise().sum().maxCoeff() * g.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(cond)) cond = std::numeric_limits<double>::infinity();
    if (!(cond <= condition_limit))
        throw SingularityError("green_static: singular at omega = " + std::to_string(omega) +
                                   " (undamped mode without bath path?)",
                               cond);
    return {omega, std::move(g), cond};
}

Eigen::Matrix2cd analytic_green_two_osc(double omega1, double omega2, double c0, double gamma, double cutoff,
                                        double omega) {
    const double delta = omega2 * omega2 - omega1 * omega1;
    const double root = std::sqrt(c0 * c0 + 0.25 * delta * delta);
    const double nu1sq = omega1 * omega1 + c0 + 0.5 * delta - root;
    const double nu2sq = omega1 * omega1 + c0 + 0.5 * delta + root;
    const double theta = 0.5 * std::atan2(2.0 * c0, -delta);
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const Complex damping(0.0, pi * ohmic_density(gamma, cutoff, omega));
    const Complex inv1 = 1.0 / (nu1sq - omega * omega - damping);
    const Complex inv2 = 1.0 / (nu2sq - omega * omega - damping);
    Eigen::Matrix2cd g;
    g(0, 0) = s * s * inv1 + c * c * inv2;
    g(1, 1) = c * c * inv1 + s * s * inv2;
    g(0, 1) = s * c * (inv1 - inv2);
    g(1, 0) = g(0, 1);
    return g;
}

NormalModes normal_modes(const NetworkSpec& network) {
    const Vector w = network.masses().cwiseSqrt().cwiseInverse();
    const Matrix k = w.asDiagonal() * network.v0() * w.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    if (es.info() != Eigen::Success) throw ValidationError("normal_modes: eigensolver failed");
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-14 * scale)
        throw ValidationError("normal_modes: v0 has a negative eigenvalue (unstable static network)");

    NormalModes nm;
    nm.frequencies = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    nm.vectors = es.eigenvectors();
    if (network.size() == 2) {
        const double theta = 0.5 * std::atan2(-2.0 * k(0, 1), k(0, 0) - k(1, 1));
        nm.theta = theta;
        nm.vectors << std::sin(theta), std::cos(theta),
                      std::cos(theta), -std::sin(theta);
    }
    return nm;
}

CVector static_poles(const Model& model) {
    const auto& net = model.network();
    const Eigen::Index n = static_cast<Eigen::Index>(net.size());
    const Matrix& v = net.v0();
    const Vector& m = net.masses();

    // Row r of G0^-1 is multiplied by (omega^2 + L_r^2): L_r is the bath cutoff on bath rows,
    // which clears the Drude denominator, and an arbitrary far value elsewhere whose roots are
    // removed again below. The result is a quartic matrix polynomial with leading term -M.
    std::vector<double> lam(n, 0.0);
    std::vector<const BathSpec*> bath_of(n, nullptr);
    double far = 1.0;
    for (const auto& b : model.baths()) far = std::max(far, b.cutoff);
    far = 3.0 * std::max(far, std::sqrt(std::max(0.0, v.diagonal().cwiseQuotient(m).maxCoeff())));
    for (Eigen::Index r = 0; r < n; ++r) lam[r] = far;
    for (const auto& b : model.baths()) {
        lam[b.node] = b.cutoff;
        bath_of[b.node] = &b;
    }

    std::array<CMatrix, 4> p;  // P0..P3; P4 = -M
    for (auto& pk : p) pk = CMatrix::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const double l2 = lam[r] * lam[r];
        for (Eigen::Index c = 0; c < n; ++c) {
            p[0](r, c) = l2 * v(r, c);
            p[2](r, c) = v(r, c);
        }
        p[2](r, r) -= l2 * m[r];
        if (bath_of[r]) p[1](r, r) = Complex(0.0, -2.0 * bath_of[r]->gamma * l2);
    }

    CMatrix comp = CMatrix::Zero(4 * n, 4 * n);
    for (int blk = 0; blk < 3; ++blk) comp.block(blk * n, (blk + 1) * n, n, n).setIdentity();
    const Vector minv = m.cwiseInverse();
    for (int d = 0; d < 4; ++d) comp.block(3 * n, d * n, n, n) = minv.asDiagonal() * p[d];

    Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
    if (es.info() != Eigen::Success) throw SingularityError("static_poles: eigensolver failed", 0.0);
    std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());

    auto remove_nearest = [&roots](Complex target) {
        auto it = std::min_element(roots.begin(), roots.end(), [&](Complex a, Complex b) {
            return std::abs(a - target) < std::abs(b - target);
        });
        if (it != roots.end()) roots.erase(it);
    };
    for (Eigen::Index r = 0; r < n; ++r) {
        if (bath_of[r]) continue;
        remove_nearest(Complex(0.0, far));
        remove_nearest(Complex(0.0, -far));
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    CVector out(static_cast<Eigen::Index>(roots.size()));
    for (std::size_t i = 0; i < roots.size(); ++i) out[static_cast<Eigen::Index>(i)] = roots[i];
    return out;
}

void check_static_poles(const Model& model) {
    const CVector poles = static_poles(model);
    std::vector<Complex> rest(poles.data(), poles.data() + poles.size());
    // Dropping Re chi leaves one pole per bath just above +i Lambda; it carries no normal mode.
    for (const auto& b : model.baths()) {
        const Complex target(0.0, b.cutoff);
        auto it = std::min_element(rest.begin(), rest.end(), [&](Complex a, Complex c) {
            return std::abs(a - target) < std::abs(c - target);
        });
        if (it != rest.end() && std::abs(*it - target) < 0.5 * b.cutoff) rest.erase(it);
    }
    for (const auto& z : rest) {
        if (z.imag() > -1e-10 * std::max(1.0, std::abs(z)))
            throw SingularityError("static Green's function has an undamped pole at omega = " +
                                       std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
                                       std::to_string(z.imag()) + "i",
                                   std::numeric_limits<double>::infinity());
    }
}

namespace {

Matrix offdiagonal_transfer(const Model& model, double omega, const CMatrix& g) {
    const auto& baths = model.baths();
    const Eigen::Index nb = static_cast<Eigen::Index>(baths.size());
    Matrix t = Matrix::Zero(nb, nb);
    for (Eigen::Index a = 0; a < nb; ++a) {
        const double ja = ohmic_density(baths[a], omega);
        for (Eigen::Index b = 0; b < nb; ++b) {
            if (a == b) continue;
            const double jb = ohmic_density(baths[b], omega);
            t(a, b) = omega * pi * ja * jb * std::norm(g(baths[a].node, baths[b].node));
        }
    }
    return t;
}

} // namespace

Matrix transfer_static(const Model& model, double omega) {
    const GreenSample gs = green_static(model, omega);
    Matrix t = offdiagonal_transfer(model, omega, gs.g);
    for (Eigen::Index a = 0; a < t.rows(); ++a) t(a, a) = -t.row(a).sum();
    return t;
}

Matrix transfer_static_trace(const Model& model, double omega) {
    const GreenSample gs = green_static(model, omega);
    Matrix t = offdiagonal_transfer(model, omega, gs.g);
    for (Eigen::Index a = 0; a < t.rows(); ++a) {
        const auto& b = model.baths()[a];
        const double j = ohmic_density(b, omega);
        t(a, a) = omega * pi * j * j * std::norm(gs.g(b.node, b.node));
    }
    return t;
}

std::vector<double> resonance_breakpoints(const std::vector<double>& centres, double width, double omega_max) {
    std::vector<double> pts{0.0, omega_max};
    const double offsets[] = {0.0, 1.0, 10.0};
    for (double c : centres) {
        c = std::abs(c);
        for (double o : offsets) {
            for (double sgn : {-1.0, 1.0}) {
                const double x = c + sgn * o * width;
                if (x > 0.0 && x < omega_max) pts.push_back(x);
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    // Merge points closer than a tiny fraction of the resonance width.
    std::vector<double> out;
    for (double x : pts)
        if (out.empty() || x - out.back() > 1e-6 * width) out.push_back(x);
    if (out.back() != omega_max) out.back() = omega_max;
    return out;
}

double default_omega_max(const Model& model, int order) {
    const double nu_max = normal_modes(model).frequencies.maxCoeff();
    double w = std::max(5.0 * nu_max, 3.0 * model.max_cutoff());
    if (auto wd = model.network().omega_d()) w = std::max(w, nu_max + (order + 1) * *wd);
    return w;
}

namespace {

// Bound on the integral of |T0_ab (n_a - n_b)| over |omega| > omega_max, from
// |J| <= 2 gamma Lambda^2 / (pi |omega|), ||G0|| <= 1 / (omega^2 m_min - ||V0||) and
// n(omega) <= exp(-omega/T) / (1 - exp(-omega_max/T)).
double static_tail_bound(const Model& model, double omega_max, const Vector& temps, std::size_t alpha) {
    const auto& net = model.network();
    const double vnorm = Eigen::SelfAdjointEigenSolver<Matrix>(net.v0(), Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .cwiseAbs()
                             .maxCoeff();
    const double gap = omega_max * omega_max * net.masses().minCoeff() - vnorm;
    if (!(gap > 0.0)) return std::numeric_limits<double>::infinity();
    const double tmax = temps.maxCoeff();
    if (tmax <= 0.0) return 0.0;
    const double occ = 2.0 * tmax * std::exp(-omega_max / tmax) / (-std::expm1(-omega_max / tmax));
    const auto& ba = model.baths()[alpha];
    double sum = 0.0;
    for (std::size_t b = 0; b < model.bath_count(); ++b) {
        if (b == alpha) continue;
        const auto& bb = model.baths()[b];
        sum += 4.0 * ba.gamma * bb.gamma * ba.cutoff * ba.cutoff * bb.cutoff * bb.cutoff / pi;
    }
    return 2.0 * sum / (omega_max * gap * gap) * occ;
}

} // namespace

std::vector<CurrentsReport> static_currents(const Model& model, const std::vector<Vector>& temperature_sets,
                                            const SolverOptions& opts) {
    const std::size_t nb = model.bath_count();
    if (nb < 2) throw ValidationError("static_currents: at least two baths required");
    if (temperature_sets.empty()) return {};
    for (const auto& t : temperature_sets) {
        if (static_cast<std::size_t>(t.size()) != nb)
            throw ValidationError("static_currents: temperature set has wrong size");
        if ((t.array() < 0.0).any()) throw ValidationError("static_currents: negative temperature");
    }
    check_static_poles(model);

    const NormalModes nm = normal_modes(model);
    const double omega_max = opts.omega_max.value_or(default_omega_max(model, 0));
    const std::vector<double> centres(nm.frequencies.data(), nm.frequencies.data() + nm.frequencies.size());
    const auto bps = resonance_breakpoints(centres, model.min_gamma(), omega_max);
    const std::size_t ns = temperature_sets.size();

    double max_cond = 0.0;
    auto integrand = [&](double w) {
        quad::VectorX<double> out = quad::VectorX<double>::Zero(static_cast<Eigen::Index>(ns * nb));
        // Folded onto w > 0: the value at -w uses G0(-w) = conj G0(w) and the odd extensions.
        for (double sgn : {1.0, -1.0}) {
            const double omega = sgn * w;
            const GreenSample gs = green_static(model, omega, opts.static_condition_limit);
            max_cond = std::max(max_cond, gs.condition);
            const Matrix t = offdiagonal_transfer(model, omega, gs.g);
            for (std::size_t s = 0; s < ns; ++s) {
                Vector n(static_cast<Eigen::Index>(nb));
                for (std::size_t a = 0; a < nb; ++a) n[a] = occupation(temperature_sets[s][a], omega);
                for (std::size_t a = 0; a < nb; ++a) {
                    double q = 0.0;
                    for (std::size_t b = 0; b < nb; ++b)
                        if (b != a) q += t(a, b) * (n[a] - n[b]);
                    out[static_cast<Eigen::Index>(s * nb + a)] += q;
                }
            }
        }
        return out;
    };

    quad::Options<double> qo;
    qo.rel_tol = opts.rel_tol;
    qo.abs_tol = opts.abs_tol;
    qo.max_intervals = opts.max_intervals;
    qo.min_width = 1e-9 * model.min_gamma();
    const auto res = quad::integrate<double>(integrand, bps, qo);

    std::vector<CurrentsReport> reports(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        auto& r = reports[s];
        r.temperatures.assign(temperature_sets[s].data(), temperature_sets[s].data() + nb);
        r.heat.resize(nb);
        r.local_work.assign(nb, 0.0);
        double err = 0.0;
        double tail = 0.0;
        for (std::size_t a = 0; a < nb; ++a) {
            r.heat[a] = res.value[static_cast<Eigen::Index>(s * nb + a)];
            err = std::max(err, res.error[static_cast<Eigen::Index>(s * nb + a)]);
            tail = std::max(tail, static_tail_bound(model, omega_max, temperature_sets[s], a));
        }
        double total = 0.0;
        for (double q : r.heat) total += q;
        r.first_law_residual = total;
        r.quadrature_error = err;
        r.tail_bound = tail;
        r.omega_max = omega_max;
        r.max_condition = max_cond;
        r.evaluations = res.evaluations;
    }
    return reports;
}

CurrentsReport static_currents(const Model& model, const SolverOptions& opts) {
    return static_currents(model, {model.temperatures()}, opts).front();
}

} // namespace heatrect
