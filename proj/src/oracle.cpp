// oracle.cpp: Star-model propagation with a symplectic splitting integrator

#include "heatrect/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "heatrect/static_solver.hpp"

namespace heatrect {

double BathModes::recurrence_time() const { return 2.0 * pi / d_omega; }

double BathModes::counterterm() const {
    return (coupling.array().square() / omega.array().square()).sum();
}

BathModes discretize_bath(const BathSpec& bath, int m_modes, double omega_max, double horizon) {
    if (m_modes < 50) throw ValidationError("discretize_bath: at least 50 modes required");
    if (!(omega_max > 0.0)) throw ValidationError("discretize_bath: omega_max must be positive");
    if (bath.gamma < 0.0 || !(bath.cutoff > 0.0)) throw ValidationError("discretize_bath: invalid bath");
    BathModes b;
    b.node = bath.node;
    b.temperature = bath.temperature;
    b.d_omega = omega_max / m_modes;
    if (horizon > 0.0 && b.recurrence_time() < horizon)
        throw ValidationError("discretize_bath: recurrence time " + std::to_string(b.recurrence_time()) +
                              " shorter than the horizon " + std::to_string(horizon) + "; increase m_modes");
    b.omega.resize(m_modes);
    b.coupling.resize(m_modes);
    for (int mu = 0; mu < m_modes; ++mu) {
        const double w = (mu + 0.5) * b.d_omega;
        b.omega[mu] = w;
        b.coupling[mu] = std::sqrt(2.0 * w * ohmic_density(bath, w) * b.d_omega);
    }
    return b;
}

std::size_t StarModel::mode_count() const {
    std::size_t m = 0;
    for (const auto& b : baths) m += static_cast<std::size_t>(b.omega.size());
    return m;
}

double StarModel::recurrence_time() const {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& b : baths) t = std::min(t, b.recurrence_time());
    return t;
}

Matrix StarModel::system_potential(double t) const {
    Matrix v = network.potential(t);
    v.diagonal() += counterterm;
    return v;
}

StarModel build_star(const Model& model, int m_modes, double omega_max, double horizon) {
    StarModel s;
    s.network = model.network();
    s.counterterm = Vector::Zero(static_cast<Eigen::Index>(model.size()));
    for (const auto& b : model.baths()) {
        s.baths.push_back(discretize_bath(b, m_modes, omega_max, horizon));
        s.counterterm[b.node] += s.baths.back().counterterm();
    }
    return s;
}

namespace {

struct SystemModes {
    Matrix to_x;  // M^-1/2 U
    Matrix to_p;  // M^1/2 U
    Vector nu;
};

SystemModes system_modes(const StarModel& star) {
    const Vector m = star.network.masses();
    const Vector ms = m.cwiseSqrt();
    const Vector mis = ms.cwiseInverse();
    Matrix v = star.network.v0();
    v.diagonal() += star.counterterm;
    const Matrix k = mis.asDiagonal() * v * mis.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (k + k.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw ValidationError("oracle: system potential with counterterm is not positive definite");
    SystemModes sm;
    sm.nu = es.eigenvalues().cwiseSqrt();
    sm.to_x = mis.asDiagonal() * es.eigenvectors();
    sm.to_p = ms.asDiagonal() * es.eigenvectors();
    return sm;
}

double coth_half(double omega, double temperature) {
    if (!(temperature > 0.0)) return 1.0;
    return 1.0 / std::tanh(omega / (2.0 * temperature));
}

// Right-multiplication of observable rows by the one-step propagator. Column layout:
// X (N), P (N), bath x (Mt), bath p (Mt).
class RowStepper {
public:
    RowStepper(const StarModel& star, double h) : star_(star), h_(h) {
        n_ = static_cast<Eigen::Index>(star.system_size());
        mt_ = static_cast<Eigen::Index>(star.mode_count());
        omega_.resize(mt_);
        Eigen::Index off = 0;
        for (const auto& b : star.baths) {
            omega_.segment(off, b.omega.size()) = b.omega;
            offsets_.push_back(off);
            off += b.omega.size();
        }
        const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
        const double w0 = 1.0 - 2.0 * w1;
        w1_ = w1;
        w0_ = w0;
        const SystemModes sm = system_modes(star);
        for (double d : {0.5 * w1 * h, 0.5 * (w1 + w0) * h}) drifts_.push_back(make_drift(sm, d));
        driven_ = star.network.driven();
        v0_ = star.network.v0();
    }

    // rows <- rows * Phi(t0 + h, t0); sub-maps in reverse time order.
    void step(Matrix& rows, double t0) const {
        drift(rows, drifts_[0]);
        kick(rows, w1_ * h_, t0 + h_ - 0.5 * w1_ * h_);
        drift(rows, drifts_[1]);
        kick(rows, w0_ * h_, t0 + 0.5 * h_);
        drift(rows, drifts_[1]);
        kick(rows, w1_ * h_, t0 + 0.5 * w1_ * h_);
        drift(rows, drifts_[0]);
    }

    Eigen::Index dimension() const { return 2 * (n_ + mt_); }
    Eigen::Index n() const { return n_; }
    Eigen::Index mt() const { return mt_; }
    const std::vector<Eigen::Index>& offsets() const { return offsets_; }

private:
    struct Drift {
        Matrix system;  // 2N x 2N, applied on the right
        Vector c, ws, sw;  // cos, omega sin, sin / omega per bath mode
    };

    Drift make_drift(const SystemModes& sm, double d) const {
        Drift dr;
        const Eigen::Index n = n_;
        const Vector c = (sm.nu * d).array().cos();
        const Vector s = (sm.nu * d).array().sin();
        // Forward map on (X, P); rows use it on the right.
        const Matrix tx_inv = sm.to_p.transpose();  // U^T M^1/2 = (M^-1/2 U)^-1
        const Matrix tp_inv = sm.to_x.transpose();  // U^T M^-1/2
        Matrix f(2 * n, 2 * n);
        f.topLeftCorner(n, n) = sm.to_x * c.asDiagonal() * tx_inv;
        f.topRightCorner(n, n) = sm.to_x * s.cwiseQuotient(sm.nu).asDiagonal() * tp_inv;
        f.bottomLeftCorner(n, n) = -sm.to_p * s.cwiseProduct(sm.nu).asDiagonal() * tx_inv;
        f.bottomRightCorner(n, n) = sm.to_p * c.asDiagonal() * tp_inv;
        dr.system = f;
        dr.c = (omega_ * d).array().cos();
        const Vector sn = (omega_ * d).array().sin();
        dr.ws = omega_.cwiseProduct(sn);
        dr.sw = sn.cwiseQuotient(omega_);
        return dr;
    }

    void drift(Matrix& rows, const Drift& dr) const {
        const Eigen::Index r = rows.rows();
        const Eigen::Index n = n_;
        rows.leftCols(2 * n) = rows.leftCols(2 * n) * dr.system;
        for (Eigen::Index j = 0; j < mt_; ++j) {
            double* a = rows.col(2 * n + j).data();
            double* b = rows.col(2 * n + mt_ + j).data();
            const double c = dr.c[j], ws = dr.ws[j], sw = dr.sw[j];
            for (Eigen::Index i = 0; i < r; ++i) {
                const double ai = a[i], bi = b[i];
                a[i] = ai * c - bi * ws;
                b[i] = ai * sw + bi * c;
            }
        }
    }

    void kick(Matrix& rows, double dur, double t) const {
        const Eigen::Index n = n_;
        for (std::size_t k = 0; k < star_.baths.size(); ++k) {
            const auto& b = star_.baths[k];
            const Eigen::Index off = offsets_[k];
            const Eigen::Index m = b.omega.size();
            rows.col(b.node) += dur * (rows.middleCols(2 * n + mt_ + off, m) * b.coupling);
            const auto pa = rows.col(n + b.node);
            for (Eigen::Index mu = 0; mu < m; ++mu) rows.col(2 * n + off + mu) += (dur * b.coupling[mu]) * pa;
        }
        if (driven_) {
            const Matrix dv = star_.network.potential(t) - v0_;
            rows.leftCols(n) -= dur * (rows.middleCols(n, n) * dv);
        }
    }

    const StarModel& star_;
    double h_;
    double w1_{0.0}, w0_{0.0};
    Eigen::Index n_{0}, mt_{0};
    Vector omega_;
    std::vector<Eigen::Index> offsets_;
    std::vector<Drift> drifts_;
    bool driven_{false};
    Matrix v0_;
};

// Observable rows at t = 0: X, P, u_alpha, v_alpha.
Matrix observable_rows(const StarModel& star, const RowStepper& st) {
    const Eigen::Index n = st.n();
    const Eigen::Index nb = static_cast<Eigen::Index>(star.baths.size());
    Matrix e = Matrix::Zero(2 * n + 2 * nb, st.dimension());
    for (Eigen::Index i = 0; i < 2 * n; ++i) e(i, i) = 1.0;
    for (Eigen::Index a = 0; a < nb; ++a) {
        const auto& b = star.baths[static_cast<std::size_t>(a)];
        const Eigen::Index off = st.offsets()[static_cast<std::size_t>(a)];
        e.block(2 * n + a, 2 * n + off, 1, b.omega.size()) = b.coupling.transpose();
        e.block(2 * n + nb + a, 2 * n + st.mt() + off, 1, b.omega.size()) = b.coupling.transpose();
    }
    return e;
}

struct Sampler {
    const StarModel& star;
    const InitialCovariance& sigma0;
    Eigen::Index n, nb, mt;
    Vector xx, pp;
    double positivity_tol;

    Sampler(const StarModel& s, const InitialCovariance& s0, const RowStepper& st, double tol)
        : star(s), sigma0(s0), n(st.n()), nb(static_cast<Eigen::Index>(s.baths.size())), mt(st.mt()),
          positivity_tol(tol) {
        xx.resize(mt);
        pp.resize(mt);
        for (std::size_t k = 0; k < s.baths.size(); ++k) {
            xx.segment(st.offsets()[k], s0.bath_xx[k].size()) = s0.bath_xx[k];
            pp.segment(st.offsets()[k], s0.bath_pp[k].size()) = s0.bath_pp[k];
        }
    }

    void record(const Eigen::Ref<const Matrix>& r, double t, OracleTrajectory& traj) const {
        const auto rs = r.leftCols(2 * n);
        const auto rx = r.middleCols(2 * n, mt);
        const auto rp = r.rightCols(mt);
        const Matrix g = rs * sigma0.system * rs.transpose() + rx * xx.asDiagonal() * rx.transpose() +
                         rp * pp.asDiagonal() * rp.transpose();
        const Matrix sxx = g.topLeftCorner(n, n);
        const Matrix sxp = g.block(0, n, n, n);
        const Matrix spp = g.block(n, n, n, n);
        const Vector& m = star.network.masses();

        Vector q(nb), qb(nb);
        for (Eigen::Index a = 0; a < nb; ++a) {
            const int node = star.baths[static_cast<std::size_t>(a)].node;
            q[a] = g(n + node, 2 * n + a) / m[node];
            qb[a] = -g(node, 2 * n + nb + a);
        }
        const double w = 0.5 * (star.network.potential_rate(t).cwiseProduct(sxx)).sum();
        const double hs = 0.5 * (m.cwiseInverse().asDiagonal() * spp).trace() +
                          0.5 * (star.system_potential(t).cwiseProduct(sxx)).sum();

        CMatrix h = g.topLeftCorner(2 * n, 2 * n).cast<Complex>();
        for (Eigen::Index i = 0; i < n; ++i) {
            h(i, n + i) += Complex(0.0, 0.5);
            h(n + i, i) -= Complex(0.0, 0.5);
        }
        const double lo = Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        const double scale = std::max(1.0, g.topLeftCorner(2 * n, 2 * n).cwiseAbs().maxCoeff());
        if (lo < -positivity_tol * scale)
            throw InstabilityError("oracle: covariance lost positivity at t = " + std::to_string(t) +
                                   "; reduce dt");
        traj.min_positivity = traj.times.empty() ? lo : std::min(traj.min_positivity, lo);

        traj.times.push_back(t);
        traj.sigma_xx.push_back(sxx);
        traj.sigma_xp.push_back(sxp);
        traj.sigma_pp.push_back(spp);
        traj.currents_commutator.push_back(q);
        traj.currents_bath_energy.push_back(qb);
        traj.work_rate.push_back(w);
        traj.system_energy.push_back(hs);
    }
};

void average_window(OracleTrajectory& traj, std::size_t first, std::size_t split, double t_begin, double t_end) {
    const std::size_t last = traj.times.size();
    const Eigen::Index nb = traj.currents_commutator.front().size();
    auto mean = [&](std::size_t lo, std::size_t hi, Vector& q, Vector& qb, double& w) {
        q = Vector::Zero(nb);
        qb = Vector::Zero(nb);
        w = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            q += traj.currents_commutator[i];
            qb += traj.currents_bath_energy[i];
            w += traj.work_rate[i];
        }
        const double cnt = static_cast<double>(hi - lo);
        q /= cnt;
        qb /= cnt;
        w /= cnt;
    };
    mean(first, last, traj.average_commutator, traj.average_bath_energy, traj.average_work);
    traj.window_start = t_begin;
    traj.window_end = t_end;
    traj.window_variation = 0.0;
    if (split > first && split < last) {
        Vector q1, q2, b1, b2;
        double w1 = 0.0, w2 = 0.0;
        mean(first, split, q1, b1, w1);
        mean(split, last, q2, b2, w2);
        const double scale = traj.average_commutator.cwiseAbs().maxCoeff();
        if (scale > 0.0) traj.window_variation = (q1 - q2).cwiseAbs().maxCoeff() / scale;
    }
}

} // namespace

InitialCovariance thermal_initial_covariance(const StarModel& star, SystemInit init, double system_temperature) {
    const SystemModes sm = system_modes(star);
    const Eigen::Index n = static_cast<Eigen::Index>(star.system_size());
    Vector cx(n), cp(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ct = init == SystemInit::thermal ? coth_half(sm.nu[i], system_temperature) : 1.0;
        cx[i] = 0.5 * ct / sm.nu[i];
        cp[i] = 0.5 * ct * sm.nu[i];
    }
    InitialCovariance s;
    s.system = Matrix::Zero(2 * n, 2 * n);
    s.system.topLeftCorner(n, n) = sm.to_x * cx.asDiagonal() * sm.to_x.transpose();
    s.system.bottomRightCorner(n, n) = sm.to_p * cp.asDiagonal() * sm.to_p.transpose();
    for (const auto& b : star.baths) {
        Vector xx(b.omega.size()), pp(b.omega.size());
        for (Eigen::Index mu = 0; mu < b.omega.size(); ++mu) {
            const double ct = coth_half(b.omega[mu], b.temperature);
            xx[mu] = 0.5 * ct / b.omega[mu];
            pp[mu] = 0.5 * ct * b.omega[mu];
        }
        s.bath_xx.push_back(xx);
        s.bath_pp.push_back(pp);
    }
    return s;
}

Matrix dense_covariance(const StarModel& star, const InitialCovariance& sigma0) {
    const Eigen::Index n = static_cast<Eigen::Index>(star.system_size());
    const Eigen::Index mt = static_cast<Eigen::Index>(star.mode_count());
    const Eigen::Index d = 2 * (n + mt);
    Matrix s = Matrix::Zero(d, d);
    s.topLeftCorner(2 * n, 2 * n) = sigma0.system;
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < star.baths.size(); ++k) {
        const Eigen::Index m = sigma0.bath_xx[k].size();
        for (Eigen::Index mu = 0; mu < m; ++mu) {
            s(2 * n + off + mu, 2 * n + off + mu) = sigma0.bath_xx[k][mu];
            s(2 * n + mt + off + mu, 2 * n + mt + off + mu) = sigma0.bath_pp[k][mu];
        }
        off += m;
    }
    return s;
}

Matrix step_propagator(const StarModel& star, double t0, double dt) {
    const RowStepper st(star, dt);
    Matrix phi = Matrix::Identity(st.dimension(), st.dimension());
    st.step(phi, t0);
    return phi;
}

Matrix propagate_dense(const StarModel& star, const Matrix& sigma0, double t_end, double dt) {
    const int steps = std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-9)));
    const double h = t_end / steps;
    const RowStepper st(star, h);
    const Eigen::Index d = st.dimension();
    Matrix s = sigma0;
    Matrix phi(d, d);
    for (int i = 0; i < steps; ++i) {
        phi.setIdentity();
        st.step(phi, i * h);
        s = phi * s * phi.transpose();
    }
    return s;
}

OracleTrajectory propagate(const StarModel& star, const InitialCovariance& sigma0, const PropagationSettings& ps) {
    if (!(ps.t_end > 0.0) || !(ps.dt > 0.0)) throw ValidationError("propagate: t_end and dt must be positive");
    if (ps.t_end > star.recurrence_time())
        throw ValidationError("propagate: horizon " + std::to_string(ps.t_end) + " exceeds the recurrence time " +
                              std::to_string(star.recurrence_time()));
    OracleTrajectory traj;

    if (!star.network.driven()) {
        const int steps = static_cast<int>(std::ceil(ps.t_end / ps.dt - 1e-9));
        const double h = ps.t_end / steps;
        const RowStepper st(star, h);
        const Sampler smp(star, sigma0, st, ps.positivity_tol);
        const int every = std::max(1, static_cast<int>(std::lround(ps.sample_dt / h)));
        Matrix rows = observable_rows(star, st);
        std::size_t first = 0;
        bool have_first = false;
        for (int i = 0; i <= steps; ++i) {
            if (i % every == 0) {
                const double t = i * h;
                if (!have_first && t >= ps.transient) {
                    first = traj.times.size();
                    have_first = true;
                }
                smp.record(rows, t, traj);
            }
            if (i < steps) st.step(rows, i * h);
        }
        if (!have_first || first + 2 > traj.times.size())
            throw ValidationError("propagate: averaging window is empty");
        const std::size_t split = first + (traj.times.size() - first) / 2;
        average_window(traj, first, split, traj.times[first], traj.times.back());
        return traj;
    }

    const double tau = star.network.period();
    const int j_count = std::max(1, ps.samples_per_period);
    int per_sample = std::max(1, static_cast<int>(std::ceil(tau / (ps.dt * j_count) - 1e-9)));
    const int steps_per_period = per_sample * j_count;
    const double h = tau / steps_per_period;
    const int periods = std::max(2, static_cast<int>(std::ceil(ps.t_end / tau - 1e-9)));
    int trans_periods = static_cast<int>(std::ceil(ps.transient / tau - 1e-9));
    trans_periods = std::min(trans_periods, periods - 1);
    if (periods * tau > star.recurrence_time() * (1.0 + 1e-12))
        throw ValidationError("propagate: whole-period horizon exceeds the recurrence time");

    const RowStepper st(star, h);
    const Sampler smp(star, sigma0, st, ps.positivity_tol);
    const Matrix e = observable_rows(star, st);
    const Eigen::Index nobs = e.rows();

    // Block j holds E Phi(j tau / J, 0).
    Matrix rows(nobs * j_count, st.dimension());
    for (int j = 0; j < j_count; ++j) {
        Matrix r = e;
        for (int s = j * per_sample - 1; s >= 0; --s) st.step(r, s * h);
        rows.middleRows(j * nobs, nobs) = r;
    }
    std::size_t first = 0, split = 0;
    const int win = periods - trans_periods;
    for (int p = 0; p < periods; ++p) {
        if (p == trans_periods) first = traj.times.size();
        if (p == trans_periods + win / 2) split = traj.times.size();
        for (int j = 0; j < j_count; ++j)
            smp.record(rows.middleRows(j * nobs, nobs), p * tau + j * tau / j_count, traj);
        if (p + 1 < periods)
            for (int s = steps_per_period - 1; s >= 0; --s) st.step(rows, s * h);
    }
    average_window(traj, first, win >= 2 ? split : first, trans_periods * tau, periods * tau);
    return traj;
}

OracleSettings resolve_oracle_settings(const Model& model, const OracleSettings& in) {
    OracleSettings s = in;
    const double gmin = model.min_gamma();
    const bool driven = model.network().driven();
    const double tau = driven ? model.network().period() : 0.0;
    if (!(s.transient > 0.0)) s.transient = 5.0 / gmin;
    if (!(s.window > 0.0)) s.window = std::max(20.0 * tau, 1.0 / gmin);
    if (!(s.bath_omega_max > 0.0)) {
        const double nu_max = normal_modes(model).frequencies.maxCoeff();
        const double wd = driven ? *model.network().omega_d() : 0.0;
        s.bath_omega_max = std::min(3.0 * model.max_cutoff(), std::max(12.0, 4.0 * (nu_max + wd)));
    }
    double t_end = s.transient + s.window;
    if (driven) t_end = std::ceil(t_end / tau - 1e-9) * tau;
    if (s.modes_per_bath <= 0)
        s.modes_per_bath = std::max(50, static_cast<int>(std::ceil(s.recurrence_margin * t_end * s.bath_omega_max /
                                                                  (2.0 * pi))));
    return s;
}

OracleComparison oracle_compare(const Model& model, const CurrentsReport& spectral, const OracleSettings& in) {
    const OracleSettings s = resolve_oracle_settings(model, in);
    const bool driven = model.network().driven();
    double t_end = s.transient + s.window;
    if (driven) t_end = std::ceil(t_end / model.network().period() - 1e-9) * model.network().period();

    const StarModel star = build_star(model, s.modes_per_bath, s.bath_omega_max, t_end);
    const Vector temps = model.temperatures();
    const double t_init = s.init_temperature.value_or(temps.mean());
    const InitialCovariance sigma0 = thermal_initial_covariance(star, s.init, t_init);

    PropagationSettings ps;
    ps.t_end = t_end;
    ps.dt = s.dt;
    ps.transient = s.transient;
    ps.sample_dt = s.sample_dt;
    ps.samples_per_period = s.samples_per_period;

    OracleComparison c;
    c.trajectory = propagate(star, sigma0, ps);
    const auto& tr = c.trajectory;
    const std::size_t nb = model.bath_count();
    double q_scale = 0.0, or_scale = 0.0, d_sp = 0.0, d_def = 0.0;
    for (std::size_t a = 0; a < nb; ++a) {
        const double sp = spectral.heat.at(a);
        const double qc = tr.average_commutator[static_cast<Eigen::Index>(a)];
        const double qb = tr.average_bath_energy[static_cast<Eigen::Index>(a)];
        c.spectral.push_back(sp);
        c.commutator.push_back(qc);
        c.bath_energy.push_back(qb);
        c.relative_per_bath.push_back(std::abs(qc - sp) / std::abs(sp));
        q_scale = std::max(q_scale, std::abs(sp));
        or_scale = std::max(or_scale, std::abs(qc));
        d_sp = std::max(d_sp, std::abs(qc - sp));
        d_def = std::max(d_def, std::abs(qc - qb));
    }
    c.deviation_spectral = d_sp / q_scale;
    c.deviation_definitions = d_def / or_scale;
    c.oracle_work = tr.average_work;
    c.spectral_work = spectral.work;
    c.window_variation = tr.window_variation;
    c.inconclusive = tr.window_variation > 0.05;
    c.modes_per_bath = s.modes_per_bath;
    c.bath_omega_max = s.bath_omega_max;
    c.t_end = t_end;
    c.recurrence_time = star.recurrence_time();
    return c;
}

void write_trajectory_csv(std::ostream& os, const OracleTrajectory& traj) {
    if (traj.times.empty()) return;
    const Eigen::Index nb = traj.currents_commutator.front().size();
    const Eigen::Index n = traj.sigma_xx.front().rows();
    os << "t";
    for (Eigen::Index a = 0; a < nb; ++a) os << ",q" << a + 1;
    for (Eigen::Index a = 0; a < nb; ++a) os << ",q_bath" << a + 1;
    os << ",w,h_s";
    for (Eigen::Index i = 0; i < n; ++i) os << ",xx" << i + 1;
    os << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        os << buf;
    };
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        put(traj.times[k]);
        for (Eigen::Index a = 0; a < nb; ++a) os << ',', put(traj.currents_commutator[k][a]);
        for (Eigen::Index a = 0; a < nb; ++a) os << ',', put(traj.currents_bath_energy[k][a]);
        os << ',', put(traj.work_rate[k]);
        os << ',', put(traj.system_energy[k]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',', put(traj.sigma_xx[k](i, i));
        os << "\n";
    }
}

} // namespace heatrect
