// metrics.cpp: Rectification and amplification figures of merit

#include "heatrect/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "heatrect/floquet_solver.hpp"
#include "heatrect/parallel.hpp"
#include "heatrect/quadrature.hpp"
#include "heatrect/static_solver.hpp"

namespace heatrect {

namespace {

constexpr double transport_floor = 1e-14;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double relative_residual(const CurrentsReport& r) {
    double scale = std::abs(r.work);
    for (double q : r.heat) scale = std::max(scale, std::abs(q));
    return scale > 0.0 ? std::abs(r.first_law_residual) / scale : 0.0;
}

RectificationPoint sentinel(double omega_d, double c0, std::string reason) {
    RectificationPoint p;
    p.omega_d = omega_d;
    p.c0 = c0;
    p.q_fwd = p.q_rev = p.w_fwd = p.w_rev = p.r_full = p.r_quasi = p.residual = nan;
    p.stable = false;
    p.reason = std::move(reason);
    return p;
}

} // namespace

double rectification(double q_fwd, double q_rev) {
    const double m = std::max(std::abs(q_fwd), std::abs(q_rev));
    if (!(m >= transport_floor)) throw DomainError("rectification: no transport (both currents below 1e-14)");
    return std::abs(q_fwd + q_rev) / m;
}

std::vector<double> quasi_currents(const CurrentsReport& report) {
    std::vector<double> q(report.heat.size());
    for (std::size_t a = 0; a < q.size(); ++a)
        q[a] = report.heat[a] + (a < report.local_work.size() ? report.local_work[a] : 0.0);
    return q;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw ValidationError("linspace: count must be positive");
    std::vector<double> v(static_cast<std::size_t>(count));
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return v;
}

RectificationPoint rectification_point(const Model& model, double omega_d, double c0, const MapOptions& opts) {
    if (model.bath_count() < 2) throw ValidationError("rectification: two baths required");
    if (model.network().driven()) {
        const StabilityReport st = stability_check(model, opts.stability);
        if (!st.stable) return sentinel(omega_d, c0, st.reason);
    }

    std::vector<CurrentsReport> reps;
    try {
        const Vector fwd = model.temperatures();
        const Vector rev = model.swapped().temperatures();
        reps = averaged_currents(model, {fwd, rev}, opts.solver);
    } catch (const InstabilityError&) {
        return sentinel(omega_d, c0, "unstable_solver");
    } catch (const QuadratureError&) {
        return sentinel(omega_d, c0, "quadrature");
    } catch (const SingularityError&) {
        return sentinel(omega_d, c0, "singular");
    }

    RectificationPoint p;
    p.omega_d = omega_d;
    p.c0 = c0;
    p.q_fwd = reps[0].heat[0];
    p.q_rev = reps[1].heat[0];
    p.w_fwd = reps[0].local_work[0];
    p.w_rev = reps[1].local_work[0];
    p.residual = std::max(relative_residual(reps[0]), relative_residual(reps[1]));
    if (!reps[0].order_converged || !reps[1].order_converged) p.reason = "order_unconverged";
    // The quasi-currents vanish identically for decoupled nodes while the full currents do not,
    // so the two coefficients fail independently.
    try {
        p.r_full = rectification(p.q_fwd, p.q_rev);
    } catch (const DomainError&) {
        p.r_full = nan;
        p.reason = "no_transport";
    }
    try {
        p.r_quasi = rectification(p.q_fwd + p.w_fwd, p.q_rev + p.w_rev);
    } catch (const DomainError&) {
        p.r_quasi = nan;
        if (p.reason.empty()) p.reason = "no_quasi_transport";
    }
    return p;
}

std::vector<RectificationPoint> rectification_map(const PointBuilder& build, const std::vector<double>& omega_d,
                                                  const std::vector<double>& c0, const MapOptions& opts) {
    const std::size_t nc = c0.size();
    std::vector<RectificationPoint> out(omega_d.size() * nc);
    parallel_for(
        out.size(), opts.workers,
        [&](std::size_t i) {
            const double wd = omega_d[i / nc];
            const double c = c0[i % nc];
            try {
                out[i] = rectification_point(build(wd, c), wd, c, opts);
            } catch (const ValidationError&) {
                out[i] = sentinel(wd, c, "invalid");
            }
        },
        opts.progress);
    return out;
}

std::vector<RectificationPoint> rectification_map(const TwoOscillatorParams& base, const std::vector<double>& omega_d,
                                                  const std::vector<double>& c0, const MapOptions& opts) {
    return rectification_map(
        [&base](double wd, double c) {
            TwoOscillatorParams p = base;
            p.omega_d = wd;
            p.c0 = c;
            return p.build();
        },
        omega_d, c0, opts);
}

namespace {

// Richardson-extrapolated central difference of a vector function.
template <typename F>
Vector richardson(F& f, double x, double h) {
    const Vector d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const Vector d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

AmplificationPoint finish_amplification(double control, double e_dot, const Vector& dq, double de, double step) {
    double scale = 0.0;
    for (Eigen::Index i = 0; i < dq.size(); ++i) scale = std::max(scale, std::abs(dq[i]));
    if (!(std::abs(de) > 1e-9 * scale) || !(std::abs(de) > 0.0))
        throw DomainError("amplification: control derivative vanishes (transistor undefined at " +
                          std::to_string(control) + ")");
    AmplificationPoint p;
    p.control = control;
    p.e_dot = e_dot;
    p.derivative_step = step;
    for (Eigen::Index i = 0; i < dq.size(); ++i) p.a.push_back(dq[i] / de);
    p.a1 = p.a.size() > 0 ? p.a[0] : 0.0;
    p.a2 = p.a.size() > 1 ? p.a[1] : 0.0;
    double sum = 1.0;
    for (double a : p.a) sum += a;
    p.residual = sum;
    return p;
}

} // namespace

AmplificationPoint amplification_dynamic(const Model& model, double omega_d, double step, const SolverOptions& opts) {
    if (!model.network().driven()) throw ValidationError("amplification_dynamic: driven model required");
    SolverOptions so = opts;
    so.rel_tol = std::min(opts.rel_tol, 1e-10);
    const std::size_t nb = model.bath_count();

    // Components: Q_1..Q_B, W.
    auto f = [&](double wd) {
        const CurrentsReport r = averaged_currents(model.with_omega_d(wd), so);
        Vector v(static_cast<Eigen::Index>(nb + 1));
        for (std::size_t a = 0; a < nb; ++a) v[static_cast<Eigen::Index>(a)] = r.heat[a];
        v[static_cast<Eigen::Index>(nb)] = r.work;
        return v;
    };

    const double e_dot = f(omega_d)[static_cast<Eigen::Index>(nb)];
    double h = step > 0.0 ? step : 1e-3 * omega_d;
    AmplificationPoint best;
    for (int it = 0; it < 6; ++it) {
        const Vector d = richardson(f, omega_d, h);
        best = finish_amplification(omega_d, e_dot, d.head(static_cast<Eigen::Index>(nb)),
                                    d[static_cast<Eigen::Index>(nb)], h);
        if (std::abs(best.residual) < 1e-4) break;
        h *= 0.5;
        if (h < 1e-8 * omega_d) break;
    }
    return best;
}

AmplificationPoint amplification_static(const Model& model3, double t3, double step, const SolverOptions& opts) {
    if (model3.bath_count() != 3) throw ValidationError("amplification_static: three baths required");
    if (model3.network().driven()) throw ValidationError("amplification_static: static model required");
    if (!(t3 > 0.0)) throw ValidationError("amplification_static: control temperature must be positive");
    SolverOptions so = opts;
    so.rel_tol = std::min(opts.rel_tol, 1e-11);

    const Vector base = model3.temperatures();
    double h = step > 0.0 ? step : 1e-3 * t3;
    h = std::min(h, 0.5 * t3);
    AmplificationPoint best;
    for (int it = 0; it < 6; ++it) {
        std::vector<Vector> sets;
        for (double dx : {h, -h, 0.5 * h, -0.5 * h}) {
            Vector t = base;
            t[2] = t3 + dx;
            sets.push_back(t);
        }
        const auto reps = static_currents(model3, sets, so);
        auto heat = [&](std::size_t i) {
            return Vector(Eigen::Map<const Vector>(reps[i].heat.data(), 3));
        };
        const Vector d1 = (heat(0) - heat(1)) / (2.0 * h);
        const Vector d2 = (heat(2) - heat(3)) / h;
        const Vector d = (4.0 * d2 - d1) / 3.0;
        Vector t = base;
        t[2] = t3;
        const double e_dot = static_currents(model3, {t}, so).front().heat[2];
        best = finish_amplification(t3, e_dot, d.head(2), d[2], h);
        if (std::abs(best.residual) < 1e-4) break;
        h *= 0.5;
    }
    for (double a : best.a)
        if (std::abs(a) > 1.0 + 1e-6)
            throw ValidationError("amplification_static: |A| = " + std::to_string(std::abs(a)) + " exceeds 1");
    return best;
}

std::vector<double> static_control_integrals(const Model& model3, const SolverOptions& opts) {
    if (model3.bath_count() != 3) throw ValidationError("static_control_integrals: three baths required");
    check_static_poles(model3);
    const double t3 = model3.baths()[2].temperature;
    const NormalModes nm = normal_modes(model3);
    const double omega_max = opts.omega_max.value_or(default_omega_max(model3, 0));
    const std::vector<double> centres(nm.frequencies.data(), nm.frequencies.data() + nm.frequencies.size());

    auto integrand = [&](double w) {
        quad::VectorX<double> v = quad::VectorX<double>::Zero(2);
        for (double sgn : {1.0, -1.0}) {
            const double omega = sgn * w;
            const Matrix t = transfer_static(model3, omega);
            const double dn = occupation_temperature_derivative(t3, omega);
            v[0] += t(0, 2) * dn;
            v[1] += t(1, 2) * dn;
        }
        return v;
    };
    quad::Options<double> qo;
    qo.rel_tol = std::min(opts.rel_tol, 1e-10);
    qo.abs_tol = opts.abs_tol;
    qo.max_intervals = opts.max_intervals;
    qo.min_width = 1e-9 * model3.min_gamma();
    const auto res =
        quad::integrate<double>(integrand, resonance_breakpoints(centres, model3.min_gamma(), omega_max), qo);
    return {res.value[0], res.value[1]};
}

} // namespace heatrect
