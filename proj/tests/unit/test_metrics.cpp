// test_metrics.cpp: Rectification, quasi-currents, maps and transistor amplification

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "heatrect/floquet_solver.hpp"
#include "heatrect/metrics.hpp"
#include "heatrect/static_solver.hpp"
#include "support.hpp"

using namespace heatrect;
using Catch::Approx;

namespace {

Model chain3(double t1, double t2, double t3, double k_left = 0.3, double k_right = 0.3) {
    Matrix v0(3, 3);
    v0 << 1.0 + k_left, -k_left, 0.0,
          -k_left, 1.2 + k_left + k_right, -k_right,
          0.0, -k_right, 1.0 + k_right;
    return Model(NetworkSpec(Vector::Ones(3), v0),
                 {{0, t1, 0.02, 10.0}, {2, t2, 0.02, 10.0}, {1, t3, 0.02, 10.0}});
}

} // namespace

TEST_CASE("rectification coefficient") {
    CHECK(rectification(1.0, -1.0) == 0.0);
    CHECK(rectification(2.0, -1.0) == Approx(0.5));
    CHECK(rectification(-1.0, -1.0) == Approx(2.0));
    CHECK(rectification(1.0, 0.0) == Approx(1.0));
    CHECK(rectification(1e-3, -4e-3) == Approx(0.75));
    CHECK_THROWS_AS(rectification(1e-15, -1e-16), DomainError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng), b = u(rng);
        const double r = rectification(a, b);
        CHECK(r >= 0.0);
        CHECK(r <= 2.0 + 1e-15);
        CHECK(rectification(b, a) == r);
        CHECK(rectification(-a, -b) == r);
        CHECK(rectification(3.0 * a, 3.0 * b) == Approx(r).epsilon(1e-14));
    }
}

TEST_CASE("quasi-currents sum to zero") {
    TwoOscillatorParams p;
    p.omega_d = 3.1419;
    const CurrentsReport r = averaged_currents(p.build());
    const auto q = quasi_currents(r);
    REQUIRE(q.size() == 2);
    CHECK(q[0] == Approx(r.heat[0] + r.local_work[0]));
    CHECK(std::abs(q[0] + q[1]) < 1e-6 * std::abs(r.work));
}

TEST_CASE("static networks do not rectify") {
    TwoOscillatorParams base;
    base.v1 = 0.0;
    const auto pts = rectification_map(
        [&](double, double c0) {
            TwoOscillatorParams p = base;
            p.c0 = c0;
            return p.build();
        },
        {0.0}, linspace(0.05, 0.8, 6));
    for (const auto& pt : pts) {
        CHECK(pt.stable);
        CHECK(pt.r_full < 1e-8);
        CHECK(pt.r_quasi < 1e-8);
        CHECK(pt.q_fwd > 0.0);
    }
    std::mt19937_64 rng(23);
    for (int i = 0; i < 5; ++i) {
        const Model m = testing::random_static_model(rng, 4, 2);
        const RectificationPoint pt = rectification_point(m, 0.0, 0.0);
        CHECK(pt.r_full < 1e-8);
    }
}

TEST_CASE("driven rectification at the reference points") {
    TwoOscillatorParams p;
    p.omega_d = 0.9633;
    RectificationPoint a = rectification_point(p.build(), 0.9633, 0.2);
    CHECK(a.stable);
    CHECK(a.q_fwd == Approx(-2.572785722e-4).epsilon(1e-6));
    CHECK(a.r_full == Approx(rectification(a.q_fwd, a.q_rev)));
    CHECK(a.r_full > 0.5);
    CHECK(a.residual < 1e-6);

    // The quasi-currents of an undriven-limit network reduce to the heat currents.
    p.v1 = 1e-6;
    RectificationPoint b = rectification_point(p.build(), 0.9633, 0.2);
    CHECK(b.r_full < 1e-6);
    CHECK(std::abs(b.r_quasi - b.r_full) < 1e-6);
}

TEST_CASE("map ordering and unstable sentinels") {
    TwoOscillatorParams base;
    base.v1 = 1.0;
    base.gamma = 0.001;
    base.omega_d = 1.0;
    const double nu = normal_modes(base.build()).frequencies.maxCoeff();
    MapOptions o;
    o.workers = 2;
    const auto pts = rectification_map(base, {2.0 * nu, 0.9633}, {0.2, 0.25}, o);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].omega_d == 2.0 * nu);
    CHECK(pts[1].c0 == 0.25);
    CHECK_FALSE(pts[0].stable);
    CHECK(std::isnan(pts[0].q_fwd));
    CHECK_FALSE(pts[0].reason.empty());
    CHECK(pts[2].omega_d == 0.9633);
}

TEST_CASE("linspace") {
    const auto v = linspace(0.2, 4.5, 100);
    REQUIRE(v.size() == 100);
    CHECK(v.front() == 0.2);
    CHECK(v.back() == 4.5);
    CHECK(linspace(1.0, 2.0, 1) == std::vector<double>{1.0});
}

TEST_CASE("static transistor amplification") {
    SECTION("mirror-symmetric chain splits the control current evenly") {
        const Model m = chain3(1.0, 1.0, 1.1);
        const AmplificationPoint a = amplification_static(m, 1.1);
        CHECK(a.a1 == Approx(-0.5).epsilon(1e-6));
        CHECK(a.a2 == Approx(-0.5).epsilon(1e-6));
        CHECK(std::abs(a.residual) < 1e-6);
    }
    SECTION("asymmetric chain matches the integral form and stays bounded") {
        const Model m = chain3(1.2, 0.8, 1.0, 0.15, 0.45);
        for (double t3 : {0.7, 1.0, 1.3}) {
            Model mt = m.with_temperatures({1.2, 0.8, t3});
            const AmplificationPoint a = amplification_static(mt, t3);
            const auto in = static_control_integrals(mt);
            CHECK(a.a1 == Approx(-in[0] / (in[0] + in[1])).epsilon(1e-5));
            CHECK(a.a2 == Approx(-in[1] / (in[0] + in[1])).epsilon(1e-5));
            CHECK(std::abs(a.a1) <= 1.0);
            CHECK(std::abs(a.a2) <= 1.0);
            CHECK(a.a1 <= 0.0);
            CHECK(a.a2 <= 0.0);
            CHECK(std::abs(a.residual) < 1e-6);
        }
    }
    SECTION("input validation") {
        TwoOscillatorParams p;
        CHECK_THROWS_AS(amplification_static(p.build(), 1.0), ValidationError);
        CHECK_THROWS_AS(amplification_static(chain3(1, 1, 1), -1.0), ValidationError);
    }
}

TEST_CASE("dynamic transistor amplification obeys the first law") {
    TwoOscillatorParams p;
    p.omega_d = 2.5;
    const AmplificationPoint a = amplification_dynamic(p.build(), 2.5);
    CHECK(std::abs(a.residual) < 1e-4);
    CHECK(a.a1 + a.a2 == Approx(-1.0).margin(1e-4));
    // Finite-difference slope agrees with a direct two-point estimate.
    const double h = 1e-3;
    const CurrentsReport up = averaged_currents(p.build().with_omega_d(2.5 + h));
    const CurrentsReport dn = averaged_currents(p.build().with_omega_d(2.5 - h));
    const double expected = (up.heat[0] - dn.heat[0]) / (up.work - dn.work);
    CHECK(a.a1 == Approx(expected).epsilon(1e-3));
    CHECK(a.e_dot == Approx(averaged_currents(p.build()).work).epsilon(1e-8));
}
