// test_oracle.cpp: Discrete-bath time-domain reference

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "heatrect/oracle.hpp"
#include "heatrect/static_solver.hpp"
#include "support.hpp"

using namespace heatrect;
using Catch::Approx;

namespace {

// Small star: two oscillators, 50 modes per bath up to omega 6.
StarModel small_star(std::optional<double> omega_d = std::nullopt, double gamma = 0.05) {
    TwoOscillatorParams p;
    p.omega_d = omega_d;
    p.gamma = gamma;
    p.v1 = 0.3;
    return build_star(p.build(), 50, 6.0);
}

// Symplectic form in the ordering (X, P, x_bath, p_bath).
Matrix symplectic_form(const StarModel& s) {
    const Eigen::Index n = static_cast<Eigen::Index>(s.system_size());
    const Eigen::Index mt = static_cast<Eigen::Index>(s.mode_count());
    const Eigen::Index d = static_cast<Eigen::Index>(s.dimension());
    Matrix j = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        j(i, n + i) = 1.0;
        j(n + i, i) = -1.0;
    }
    for (Eigen::Index i = 0; i < mt; ++i) {
        j(2 * n + i, 2 * n + mt + i) = 1.0;
        j(2 * n + mt + i, 2 * n + i) = -1.0;
    }
    return j;
}

// Quadratic form of the undriven total Hamiltonian, built independently of the propagator.
Matrix hamiltonian_matrix(const StarModel& s) {
    const Eigen::Index n = static_cast<Eigen::Index>(s.system_size());
    const Eigen::Index mt = static_cast<Eigen::Index>(s.mode_count());
    Matrix h = Matrix::Zero(s.dimension(), s.dimension());
    h.topLeftCorner(n, n) = s.network.v0();
    h.topLeftCorner(n, n).diagonal() += s.counterterm;
    h.block(n, n, n, n) = s.network.masses().cwiseInverse().asDiagonal();
    Eigen::Index off = 0;
    for (const auto& b : s.baths) {
        for (Eigen::Index mu = 0; mu < b.omega.size(); ++mu) {
            const Eigen::Index x = 2 * n + off + mu;
            h(x, x) = b.omega[mu] * b.omega[mu];
            h(x, b.node) = h(b.node, x) = -b.coupling[mu];
            h(2 * n + mt + off + mu, 2 * n + mt + off + mu) = 1.0;
        }
        off += b.omega.size();
    }
    return h;
}

} // namespace

TEST_CASE("bath discretisation") {
    const BathSpec bath{0, 1.1, 0.01, 10.0};
    const BathModes b = discretize_bath(bath, 400, 30.0);
    REQUIRE(b.omega.size() == 400);
    CHECK(b.d_omega == Approx(0.075));
    CHECK(b.omega[0] == Approx(0.0375));
    CHECK(b.recurrence_time() == Approx(2.0 * M_PI / 0.075));
    for (Eigen::Index mu = 0; mu < 400; mu += 37) {
        const double w = b.omega[mu];
        CHECK(b.coupling[mu] * b.coupling[mu] / (2.0 * w * b.d_omega) == Approx(ohmic_density(bath, w)).epsilon(1e-13));
    }
    // sum c^2 / omega^2 approximates (4 gamma Lambda / pi) atan(Omega / Lambda).
    const double exact = 4.0 * 0.01 * 10.0 / M_PI * std::atan(3.0);
    CHECK(b.counterterm() == Approx(exact).epsilon(1e-4));

    CHECK_THROWS_AS(discretize_bath(bath, 49, 30.0), ValidationError);
    CHECK_THROWS_AS(discretize_bath(bath, 100, 30.0, 25.0), ValidationError);
    CHECK_NOTHROW(discretize_bath(bath, 100, 30.0, 20.0));
    CHECK(discretize_bath({0, 1.0, 0.0, 10.0}, 60, 5.0).coupling.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("thermal initial covariance") {
    const StarModel s = small_star();
    const InitialCovariance g = thermal_initial_covariance(s, SystemInit::ground);
    for (std::size_t k = 0; k < 2; ++k) {
        const BathModes& b = s.baths[k];
        for (Eigen::Index mu = 0; mu < b.omega.size(); ++mu) {
            const double w = b.omega[mu];
            const double c = 1.0 / std::tanh(w / (2.0 * b.temperature));
            CHECK(g.bath_xx[k][mu] == Approx(0.5 * c / w).epsilon(1e-13));
            CHECK(g.bath_pp[k][mu] == Approx(0.5 * c * w).epsilon(1e-13));
        }
    }
    // Ground state saturates the uncertainty relation mode by mode: det of each 2x2 block is 1/4.
    Matrix v = s.network.v0();
    v.diagonal() += s.counterterm;
    const Matrix xx = g.system.topLeftCorner(2, 2);
    const Matrix pp = g.system.bottomRightCorner(2, 2);
    CHECK(g.system.block(0, 2, 2, 2).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((pp - 0.25 * (xx.inverse())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((0.5 * (v * xx + xx * v) - pp).cwiseAbs().maxCoeff() < 1e-12);

    // High temperature approaches equipartition: <X V X> -> N T.
    const InitialCovariance hot = thermal_initial_covariance(s, SystemInit::thermal, 200.0);
    CHECK((v.cwiseProduct(hot.system.topLeftCorner(2, 2))).sum() == Approx(2.0 * 200.0).epsilon(1e-4));
    const Matrix dense = dense_covariance(s, g);
    CHECK(dense.rows() == static_cast<Eigen::Index>(s.dimension()));
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("one-step propagator is symplectic and conserves energy") {
    const StarModel s = small_star();
    const Matrix j = symplectic_form(s);
    const Matrix phi = step_propagator(s, 0.0, 0.04);
    CHECK((phi.transpose() * j * phi - j).cwiseAbs().maxCoeff() < 1e-12);

    const StarModel sd = small_star(2.7);
    const Matrix phid = step_propagator(sd, 0.31, 0.04);
    CHECK((phid.transpose() * j * phid - j).cwiseAbs().maxCoeff() < 1e-12);

    const Matrix h = hamiltonian_matrix(s);
    const Matrix sigma0 = dense_covariance(s, thermal_initial_covariance(s, SystemInit::ground));
    const double e0 = 0.5 * (h.cwiseProduct(sigma0)).sum();
    const Matrix sigma = propagate_dense(s, sigma0, 12.0, 0.04);
    CHECK(0.5 * (h.cwiseProduct(sigma)).sum() == Approx(e0).epsilon(1e-7));
}

TEST_CASE("row propagation agrees with dense covariance propagation") {
    for (std::optional<double> wd : {std::optional<double>{}, std::optional<double>{2.5}}) {
        const StarModel s = small_star(wd);
        const InitialCovariance init = thermal_initial_covariance(s, SystemInit::ground);
        PropagationSettings ps;
        ps.dt = 0.04;
        double t_end = 10.0;
        if (wd) t_end = 4.0 * s.network.period();
        ps.t_end = t_end;
        ps.sample_dt = 0.04;
        ps.samples_per_period = 8;
        const OracleTrajectory tr = propagate(s, init, ps);
        // Driven runs sample the last period at j tau / J; compare at the start of the last period.
        std::size_t idx = tr.times.size() - 1;
        if (wd) idx = tr.times.size() - 8;
        const double t = tr.times[idx];
        const double dt_dense = wd ? s.network.period() / std::ceil(s.network.period() / (0.04 * 8)) / 8 : 0.04;
        const Matrix sigma = propagate_dense(s, dense_covariance(s, init), t, dt_dense);
        CHECK((sigma.topLeftCorner(2, 2) - tr.sigma_xx[idx]).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((sigma.block(2, 2, 2, 2) - tr.sigma_pp[idx]).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("pointwise system energy balance") {
    for (std::optional<double> wd : {std::optional<double>{}, std::optional<double>{3.1}}) {
        const StarModel s = small_star(wd);
        PropagationSettings ps;
        ps.dt = 0.01;
        ps.sample_dt = 0.01;
        ps.samples_per_period = 128;
        ps.t_end = wd ? 6.0 * s.network.period() : 12.0;
        const OracleTrajectory tr = propagate(s, thermal_initial_covariance(s, SystemInit::ground), ps);
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 1; i + 1 < tr.times.size(); ++i) {
            const double fd = (tr.system_energy[i + 1] - tr.system_energy[i - 1]) / (tr.times[i + 1] - tr.times[i - 1]);
            const double rhs = tr.currents_commutator[i].sum() + tr.work_rate[i];
            worst = std::max(worst, std::abs(fd - rhs));
            scale = std::max(scale, std::abs(rhs));
        }
        CHECK(worst < 1e-2 * scale);
        CHECK(tr.min_positivity > -1e-10);
    }
}

TEST_CASE("uncoupled baths carry no current") {
    StarModel s;
    TwoOscillatorParams p;
    p.omega_d = 2.0;
    s.network = p.build().network();
    s.counterterm = Vector::Zero(2);
    s.baths.push_back(discretize_bath({0, 2.0, 0.0, 10.0}, 60, 6.0));
    s.baths.push_back(discretize_bath({1, 0.5, 0.0, 10.0}, 60, 6.0));
    PropagationSettings ps;
    ps.t_end = 20.0;
    ps.samples_per_period = 8;
    const OracleTrajectory tr = propagate(s, thermal_initial_covariance(s, SystemInit::thermal, 1.0), ps);
    for (const auto& q : tr.currents_commutator) CHECK(q.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& q : tr.currents_bath_energy) CHECK(q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("settings resolution and validation") {
    const Model m = testing::paper_params(3.1419).build();
    const OracleSettings s = resolve_oracle_settings(m, {});
    CHECK(s.transient == Approx(500.0));
    CHECK(s.window == Approx(100.0));
    CHECK(s.bath_omega_max <= 30.0);
    CHECK(s.bath_omega_max >= 12.0);
    const double t_end = std::ceil(600.0 / (2.0 * M_PI / 3.1419) - 1e-9) * 2.0 * M_PI / 3.1419;
    CHECK(2.0 * M_PI * s.modes_per_bath / s.bath_omega_max >= t_end);

    const StarModel star = small_star();
    PropagationSettings ps;
    ps.t_end = star.recurrence_time() * 1.5;
    CHECK_THROWS_AS(propagate(star, thermal_initial_covariance(star), ps), ValidationError);
}

TEST_CASE("static reference run matches the spectral currents") {
    const Model m = testing::paper_params().build();
    const CurrentsReport sp = static_currents(m);
    const OracleComparison c = oracle_compare(m, sp);
    CHECK(c.deviation_spectral < 0.03);
    CHECK(c.deviation_definitions < 0.01);
    CHECK_FALSE(c.inconclusive);
    CHECK(std::abs(c.oracle_work) < 1e-12);
    CHECK(c.trajectory.min_positivity > -1e-8);
    CHECK(c.t_end <= c.recurrence_time);

    std::ostringstream os;
    write_trajectory_csv(os, c.trajectory);
    const std::string csv = os.str();
    CHECK(csv.rfind("t,q1,q2,q_bath1,q_bath2,w,h_s,xx1,xx2\n", 0) == 0);
}
