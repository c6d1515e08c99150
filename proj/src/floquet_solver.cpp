// floquet_solver.cpp: Truncated Floquet amplitude system and period-averaged energy balance

#include "heatrect/floquet_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "heatrect/quadrature.hpp"
#include "heatrect/static_solver.hpp"

namespace heatrect {

namespace {

double drive_frequency(const Model& model) { return model.network().omega_d().value_or(0.0); }

void check_order(const Model& model, int order) {
    if (order < 0) throw ValidationError("floquet: negative truncation order");
    if (model.network().max_harmonic() > order)
        throw ValidationError("floquet: truncation K = " + std::to_string(order) + " below the largest drive harmonic " +
                              std::to_string(model.network().max_harmonic()));
}

struct Factorised {
    Eigen::PartialPivLU<CMatrix> lu;
    double condition{1.0};
};

Factorised factorise(const Model& model, double omega, int order, double condition_limit) {
    Factorised f;
    f.lu.compute(floquet_system(model, omega, order));
    const double rc = f.lu.rcond();
    f.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(f.condition <= condition_limit))
        throw SingularityError("floquet: block system singular at omega = " + std::to_string(omega) +
                                   " (parametric instability?)",
                               f.condition);
    return f;
}

// Columns of A_k at the bath nodes, for all k: result(row (k+K)*N + i, col alpha).
CMatrix bath_columns(const Model& model, const Factorised& f, int order) {
    const Eigen::Index n = static_cast<Eigen::Index>(model.size());
    const Eigen::Index nb = static_cast<Eigen::Index>(model.bath_count());
    CMatrix rhs = CMatrix::Zero((2 * order + 1) * n, nb);
    for (Eigen::Index a = 0; a < nb; ++a) rhs(order * n + model.baths()[a].node, a) = 1.0;
    return f.lu.solve(rhs);
}

// Same columns for nearest-neighbour drives (harmonics +-1 only) from the matrix continued
// fraction A_{k+1} = R_{k+1} A_k, A_{-k-1} = L_{-k-1} A_{-k}. `condition` receives the worst
// 1-norm condition number of the N x N pivots.
template <typename Mat>
CMatrix chain_columns_impl(const Model& model, double omega, int order, double condition_limit, double& condition) {
    const Eigen::Index n = static_cast<Eigen::Index>(model.size());
    const Eigen::Index nb = static_cast<Eigen::Index>(model.bath_count());
    const double wd = drive_frequency(model);
    const Mat vp = model.network().harmonic(1);
    const Mat vm = model.network().harmonic(-1);
    const Matrix& v0 = model.network().v0();
    const Vector& mass = model.network().masses();

    auto pivot = [&](double w) {
        Mat d = v0.cast<Complex>();
        d.diagonal() -= (w * w) * mass.cast<Complex>();
        for (const auto& b : model.baths()) d(b.node, b.node) -= Complex(0.0, pi * ohmic_density(b, w));
        return d;
    };
    condition = 1.0;
    auto invert = [&](const Mat& m) {
        const Mat inv = m.partialPivLu().inverse();
        const double c = m.cwiseAbs().colwise().sum().maxCoeff() * inv.cwiseAbs().colwise().sum().maxCoeff();
        condition = std::max(condition, c);
        if (!(c <= condition_limit))
            throw SingularityError("floquet: block system singular at omega = " + std::to_string(omega) +
                                       " (parametric instability?)",
                                   c);
        return inv;
    };

    std::vector<Mat> up(static_cast<std::size_t>(order + 1)), down(static_cast<std::size_t>(order + 1));
    Mat acc = Mat::Zero(n, n);
    for (int k = order; k >= 1; --k) {
        up[k] = -(invert(pivot(omega - k * wd) + vm * acc) * vp);
        acc = up[k];
    }
    acc.setZero();
    for (int k = order; k >= 1; --k) {
        down[k] = -(invert(pivot(omega + k * wd) + vp * acc) * vm);
        acc = down[k];
    }
    Mat d0 = pivot(omega);
    if (order >= 1) d0 += vm * up[1] + vp * down[1];
    const Mat g = invert(d0);

    CMatrix cols((2 * order + 1) * n, nb);
    for (Eigen::Index a = 0; a < nb; ++a) cols.block(order * n, a, n, 1) = g.col(model.baths()[a].node);
    for (int k = 1; k <= order; ++k) {
        cols.block((k + order) * n, 0, n, nb) = up[k] * cols.block((k - 1 + order) * n, 0, n, nb);
        cols.block((-k + order) * n, 0, n, nb) = down[k] * cols.block((-k + 1 + order) * n, 0, n, nb);
    }
    return cols;
}

CMatrix chain_columns(const Model& model, double omega, int order, double condition_limit, double& condition) {
    using Small = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;
    if (model.size() <= 8) return chain_columns_impl<Small>(model, omega, order, condition_limit, condition);
    return chain_columns_impl<CMatrix>(model, omega, order, condition_limit, condition);
}

// T_{beta alpha} (off-diagonal) and T~_alpha only.
void accumulate_transfer(const Model& model, double omega, int order, const CMatrix& cols, Matrix& t,
                         Vector& t_tilde) {
    const auto& baths = model.baths();
    const Eigen::Index n = static_cast<Eigen::Index>(model.size());
    const Eigen::Index nb = static_cast<Eigen::Index>(baths.size());
    const double wd = drive_frequency(model);
    t.setZero(nb, nb);
    t_tilde.setZero(nb);
    for (int k = -order; k <= order; ++k) {
        const double shifted = omega - k * wd;
        for (Eigen::Index b = 0; b < nb; ++b) {
            const double j_out = pi * ohmic_density(baths[b], shifted);
            for (Eigen::Index a = 0; a < nb; ++a) {
                const double r = j_out * std::norm(cols((k + order) * n + baths[b].node, a)) *
                                 ohmic_density(baths[a], omega);
                t(b, a) += shifted * r;
                t_tilde[a] -= (k * wd) * r;
            }
        }
    }
}

bool nearest_neighbour_drive(const Model& model) {
    return model.network().driven() && model.network().max_harmonic() == 1;
}

// Rates, T and T~ from the bath columns of the amplitudes.
DynamicTransferSample transfer_from_columns(const Model& model, double omega, int order, const CMatrix& cols) {
    const auto& baths = model.baths();
    const Eigen::Index n = static_cast<Eigen::Index>(model.size());
    const Eigen::Index nb = static_cast<Eigen::Index>(baths.size());
    const double wd = drive_frequency(model);

    DynamicTransferSample s;
    s.omega = omega;
    s.order = order;
    s.t = Matrix::Zero(nb, nb);
    s.t_tilde = Vector::Zero(nb);
    s.rates.assign(static_cast<std::size_t>(2 * order + 1), Matrix::Zero(nb, nb));

    Vector j_in(nb);
    for (Eigen::Index a = 0; a < nb; ++a) j_in[a] = ohmic_density(baths[a], omega);
    for (int k = -order; k <= order; ++k) {
        const double shifted = omega - k * wd;
        Matrix& r = s.rates[static_cast<std::size_t>(k + order)];
        for (Eigen::Index b = 0; b < nb; ++b) {
            const double j_out = ohmic_density(baths[b], shifted);
            for (Eigen::Index a = 0; a < nb; ++a)
                r(b, a) = pi * j_out * std::norm(cols((k + order) * n + baths[b].node, a)) * j_in[a];
        }
        s.t += shifted * r;
        if (k != 0) s.t_tilde -= (k * wd) * r.colwise().sum().transpose();
    }
    for (Eigen::Index a = 0; a < nb; ++a) {
        double off = 0.0;
        for (Eigen::Index b = 0; b < nb; ++b)
            if (b != a) off += s.t(b, a);
        s.t(a, a) = s.t_tilde[a] - off;
    }
    return s;
}

} // namespace

int default_floquet_order(const Model& model) {
    if (!model.network().driven()) return 0;
    return model.network().max_harmonic() + 3;
}

CMatrix floquet_system(const Model& model, double omega, int order) {
    check_order(model, order);
    const Eigen::Index n = static_cast<Eigen::Index>(model.size());
    const double wd = drive_frequency(model);
    const Eigen::Index dim = (2 * order + 1) * n;
    CMatrix s = CMatrix::Zero(dim, dim);
    for (int k = -order; k <= order; ++k) {
        const Eigen::Index row = (k + order) * n;
        s.block(row, row, n, n) = inverse_green_static(model, omega - k * wd);
        for (const auto& [j, vj] : model.network().harmonics()) {
            const int col = k - j;
            if (col < -order || col > order) continue;
            s.block(row, (col + order) * n, n, n) = vj;
        }
    }
    return s;
}

FloquetAmplitudes solve_amplitudes(const Model& model, double omega, int order, double condition_limit) {
    check_order(model, order);
    const Eigen::Index n = static_cast<Eigen::Index>(model.size());
    const Factorised f = factorise(model, omega, order, condition_limit);
    CMatrix rhs = CMatrix::Zero((2 * order + 1) * n, n);
    rhs.block(order * n, 0, n, n).setIdentity();
    const CMatrix x = f.lu.solve(rhs);

    FloquetAmplitudes amps;
    amps.omega = omega;
    amps.order = order;
    amps.condition = f.condition;
    for (int k = -order; k <= order; ++k) amps.blocks.push_back(x.block((k + order) * n, 0, n, n));
    amps.residual = amplitude_residual(model, amps);
    return amps;
}

double amplitude_residual(const Model& model, const FloquetAmplitudes& amps) {
    const Eigen::Index n = static_cast<Eigen::Index>(model.size());
    const double wd = drive_frequency(model);
    const int order = amps.order;
    double worst = 0.0;
    for (int k = -order; k <= order; ++k) {
        CMatrix d = inverse_green_static(model, amps.omega - k * wd) * amps.a(k);
        for (const auto& [j, vj] : model.network().harmonics()) {
            const int col = k - j;
            if (col < -order || col > order) continue;
            d += vj * amps.a(col);
        }
        if (k == 0) d -= CMatrix::Identity(n, n);
        worst = std::max(worst, d.norm());
    }
    return worst;
}

FloquetAmplitudes perturbative_amplitudes(const Model& model, double omega) {
    const auto& net = model.network();
    if (!net.driven()) throw UnsupportedError("perturbative_amplitudes: model is not driven");
    for (const auto& [k, vk] : net.harmonics())
        if (std::abs(k) != 1) throw UnsupportedError("perturbative_amplitudes: only harmonics +-1 are supported");
    const double wd = *net.omega_d();
    const CMatrix g = green_static(model, omega).g;
    const CMatrix gm = green_static(model, omega - wd).g;
    const CMatrix gp = green_static(model, omega + wd).g;
    const CMatrix v1 = net.harmonic(1);
    const CMatrix vm1 = net.harmonic(-1);

    FloquetAmplitudes amps;
    amps.omega = omega;
    amps.order = 1;
    amps.blocks = {-gp * vm1 * g, g + g * v1 * gp * vm1 * g + g * vm1 * gm * v1 * g, -gm * v1 * g};
    amps.residual = amplitude_residual(model, amps);
    return amps;
}

DynamicTransferSample dynamic_transfer(const Model& model, double omega, int order, double condition_limit) {
    check_order(model, order);
    const Factorised f = factorise(model, omega, order, condition_limit);
    DynamicTransferSample s = transfer_from_columns(model, omega, order, bath_columns(model, f, order));
    s.condition = f.condition;
    return s;
}

DynamicTransferSet dynamic_transfer(const Model& model, const std::vector<double>& grid, int order,
                                    double condition_limit) {
    DynamicTransferSet set;
    set.grid = grid;
    set.order = order;
    set.samples.reserve(grid.size());
    for (double w : grid) set.samples.push_back(dynamic_transfer(model, w, order, condition_limit));
    return set;
}

namespace {

struct Integrated {
    quad::Result<double> result;
    double max_condition{0.0};
    double tail{0.0};
};

// Vector integrand layout: for each order in `orders`, for each temperature set,
// [Q_1..Q_B, W_1..W_B].
Integrated integrate_currents(const Model& model, const std::vector<Vector>& temps, const std::vector<int>& orders,
                              double omega_max, const SolverOptions& opts) {
    const std::size_t nb = model.bath_count();
    const std::size_t ns = temps.size();
    const Eigen::Index block = static_cast<Eigen::Index>(2 * nb);
    const Eigen::Index dim = static_cast<Eigen::Index>(orders.size() * ns) * block;
    const double wd = drive_frequency(model);

    Integrated out;
    Matrix t;
    Vector t_tilde;
    auto evaluate = [&](double omega) {
        quad::VectorX<double> v = quad::VectorX<double>::Zero(dim);
        for (std::size_t o = 0; o < orders.size(); ++o) {
            const int order = orders[o];
            CMatrix cols;
            try {
                double cond = 1.0;
                if (nearest_neighbour_drive(model)) {
                    cols = chain_columns(model, omega, order, opts.floquet_condition_limit, cond);
                } else {
                    const Factorised f = factorise(model, omega, order, opts.floquet_condition_limit);
                    cond = f.condition;
                    cols = bath_columns(model, f, order);
                }
                out.max_condition = std::max(out.max_condition, cond);
            } catch (const SingularityError& e) {
                throw InstabilityError(std::string("averaged_currents: ") + e.what());
            }
            accumulate_transfer(model, omega, order, cols, t, t_tilde);
            for (std::size_t set = 0; set < ns; ++set) {
                const Eigen::Index base = static_cast<Eigen::Index>(o * ns + set) * block;
                Vector occ(static_cast<Eigen::Index>(nb));
                for (std::size_t a = 0; a < nb; ++a) occ[a] = occupation(temps[set][a], omega) + 0.5;
                for (std::size_t a = 0; a < nb; ++a) {
                    double q = -t_tilde[a] * occ[a];
                    for (std::size_t b = 0; b < nb; ++b)
                        if (b != a) q += t(b, a) * occ[a] - t(a, b) * occ[b];
                    v[base + static_cast<Eigen::Index>(a)] = q;
                    v[base + static_cast<Eigen::Index>(nb + a)] = t_tilde[a] * occ[a];
                }
            }
        }
        return v;
    };

    const NormalModes nm = normal_modes(model);
    std::vector<double> centres;
    const int kmax = orders.front();
    for (Eigen::Index i = 0; i < nm.frequencies.size(); ++i)
        for (int k = -kmax; k <= kmax; ++k)
            for (double sgn : {-1.0, 1.0}) {
                const double c = std::abs(sgn * nm.frequencies[i] + k * wd);
                if (c < omega_max) centres.push_back(c);
            }
    std::vector<double> bps = resonance_breakpoints(centres, model.min_gamma(), omega_max);

    quad::Options<double> qo;
    qo.rel_tol = opts.rel_tol;
    qo.abs_tol = opts.abs_tol;
    qo.max_intervals = opts.max_intervals;
    qo.min_width = 1e-9 * model.min_gamma();

    if (opts.fold) {
        // Both T and T~ are odd in omega and n + 1/2 is odd, so the integrand is even.
        auto folded = [&](double w) -> quad::VectorX<double> { return 2.0 * evaluate(w); };
        out.result = quad::integrate<double>(folded, bps, qo);
        const auto f1 = folded(omega_max);
        const auto f2 = folded(2.0 * omega_max);
        const double a1 = f1.cwiseAbs().maxCoeff();
        const double a2 = f2.cwiseAbs().maxCoeff();
        // Power-law tail f ~ omega^-p with p from the two samples (p >= 2 assumed).
        const double p = (a2 > 0.0 && a1 > a2) ? std::max(2.0, std::log2(a1 / a2)) : 2.0;
        out.tail = a1 * omega_max / (p - 1.0);
    } else {
        std::vector<double> full;
        for (double x : bps) {
            full.push_back(x);
            full.push_back(-x);
        }
        out.result = quad::integrate<double>(evaluate, full, qo);
        const double a1 = std::max(evaluate(omega_max).cwiseAbs().maxCoeff(), evaluate(-omega_max).cwiseAbs().maxCoeff());
        const double a2 =
            std::max(evaluate(2.0 * omega_max).cwiseAbs().maxCoeff(), evaluate(-2.0 * omega_max).cwiseAbs().maxCoeff());
        const double p = (a2 > 0.0 && a1 > a2) ? std::max(2.0, std::log2(a1 / a2)) : 2.0;
        out.tail = 2.0 * a1 * omega_max / (p - 1.0);
    }
    return out;
}

std::vector<CurrentsReport> make_reports(const Model& model, const std::vector<Vector>& temps,
                                         const Integrated& in, std::size_t level, int order, double omega_max) {
    const std::size_t nb = model.bath_count();
    const std::size_t ns = temps.size();
    std::vector<CurrentsReport> reports(ns);
    for (std::size_t t = 0; t < ns; ++t) {
        auto& r = reports[t];
        const Eigen::Index base = static_cast<Eigen::Index>((level * ns + t) * 2 * nb);
        r.temperatures.assign(temps[t].data(), temps[t].data() + nb);
        r.heat.resize(nb);
        r.local_work.resize(nb);
        double err = 0.0;
        for (std::size_t a = 0; a < nb; ++a) {
            r.heat[a] = in.result.value[base + static_cast<Eigen::Index>(a)];
            r.local_work[a] = in.result.value[base + static_cast<Eigen::Index>(nb + a)];
            err = std::max({err, in.result.error[base + static_cast<Eigen::Index>(a)],
                            in.result.error[base + static_cast<Eigen::Index>(nb + a)]});
        }
        r.work = 0.0;
        double qsum = 0.0;
        for (std::size_t a = 0; a < nb; ++a) {
            r.work += r.local_work[a];
            qsum += r.heat[a];
        }
        r.first_law_residual = qsum + r.work;
        r.quadrature_error = err;
        r.tail_bound = in.tail;
        r.omega_max = omega_max;
        r.max_condition = in.max_condition;
        r.evaluations = in.result.evaluations;
        r.floquet_order = order;
        r.driven = model.network().driven();
    }
    return reports;
}

double level_difference(const quad::Result<double>& res, Eigen::Index half) {
    const auto lo = res.value.head(half);
    const auto hi = res.value.tail(half);
    const double scale = hi.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (lo - hi).cwiseAbs().maxCoeff() / scale;
}

} // namespace

std::vector<CurrentsReport> averaged_currents(const Model& model, const std::vector<Vector>& temperature_sets,
                                              const SolverOptions& opts) {
    const std::size_t nb = model.bath_count();
    if (nb < 1) throw ValidationError("averaged_currents: at least one bath required");
    if (temperature_sets.empty()) return {};
    for (const auto& t : temperature_sets) {
        if (static_cast<std::size_t>(t.size()) != nb)
            throw ValidationError("averaged_currents: temperature set has wrong size");
        if ((t.array() < 0.0).any()) throw ValidationError("averaged_currents: negative temperature");
    }
    check_static_poles(model);

    const bool driven = model.network().driven();
    int order = driven ? opts.floquet_order.value_or(default_floquet_order(model)) : 0;
    check_order(model, order);

    if (!driven || !opts.auto_escalate) {
        const double omega_max = opts.omega_max.value_or(default_omega_max(model, order));
        const Integrated in = integrate_currents(model, temperature_sets, {order}, omega_max, opts);
        return make_reports(model, temperature_sets, in, 0, order, omega_max);
    }

    for (;;) {
        const int upper = order + 2;
        const double omega_max = opts.omega_max.value_or(default_omega_max(model, upper));
        const Integrated in = integrate_currents(model, temperature_sets, {order, upper}, omega_max, opts);
        const Eigen::Index half = in.result.value.size() / 2;
        const bool converged = level_difference(in.result, half) < opts.order_tol;
        if (converged || upper + 2 > opts.max_floquet_order) {
            auto reports = make_reports(model, temperature_sets, in, 1, upper, omega_max);
            for (auto& r : reports) r.order_converged = converged;
            return reports;
        }
        order += 2;
    }
}

CurrentsReport averaged_currents(const Model& model, const SolverOptions& opts) {
    return averaged_currents(model, {model.temperatures()}, opts).front();
}

} // namespace heatrect
