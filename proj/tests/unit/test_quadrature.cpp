// test_quadrature.cpp: Adaptive Gauss-Kronrod integration

#include <catch_amalgamated.hpp>

#include <cmath>

#include "heatrect/model.hpp"
#include "heatrect/quadrature.hpp"

using namespace heatrect;
using Catch::Approx;
using V = quad::VectorX<double>;

TEST_CASE("polynomials are exact on one panel") {
    auto f = [](double x) {
        V v(2);
        v << x * x * x * x, std::pow(x, 13);
        return v;
    };
    const auto r = quad::integrate<double>(f, {0.0, 1.0});
    CHECK(r.value[0] == Approx(0.2).epsilon(1e-15));
    CHECK(r.value[1] == Approx(1.0 / 14).epsilon(1e-14));
    CHECK(r.evaluations == 15);
}

TEST_CASE("narrow Lorentzians converge with and without breakpoints") {
    const double g = 1e-3;
    auto f = [g](double x) {
        V v(1);
        v << g / pi / ((x - 1.3) * (x - 1.3) + g * g);
        return v;
    };
    const double exact = (std::atan((5.0 - 1.3) / g) - std::atan(-1.3 / g)) / pi;
    quad::Options<double> o;
    o.rel_tol = 1e-10;
    const auto with = quad::integrate<double>(f, {0.0, 1.3, 5.0}, o);
    CHECK(with.value[0] == Approx(exact).epsilon(1e-10));
    const auto without = quad::integrate<double>(f, {0.0, 5.0}, o);
    CHECK(without.value[0] == Approx(exact).epsilon(1e-9));
    CHECK(with.evaluations < without.evaluations);
}

TEST_CASE("error estimate bounds the true error") {
    auto f = [](double x) {
        V v(1);
        v << std::exp(-x) * std::cos(20 * x);
        return v;
    };
    const double exact = (1.0 - std::exp(-3.0) * (std::cos(60.0) - 20 * std::sin(60.0))) / 401.0;
    for (double tol : {1e-4, 1e-7, 1e-10}) {
        quad::Options<double> o;
        o.rel_tol = tol;
        const auto r = quad::integrate<double>(f, {0.0, 3.0}, o);
        CHECK(r.converged);
        CHECK(std::abs(r.value[0] - exact) <= r.error_norm + 1e-16);
    }
}

TEST_CASE("failure modes") {
    auto sing = [](double x) {
        V v(1);
        v << 1.0 / std::sqrt(std::abs(x - 0.5) + 1e-300) * (x > 0.5 ? 1.0 : -3.0);
        return v;
    };
    quad::Options<double> o;
    o.rel_tol = 1e-14;
    o.max_intervals = 20;
    CHECK_THROWS_AS(quad::integrate<double>(sing, {0.0, 1.0}, o), QuadratureError);
    o.throw_on_failure = false;
    const auto r = quad::integrate<double>(sing, {0.0, 1.0}, o);
    CHECK_FALSE(r.converged);
    CHECK(r.error_norm > 0.0);
    CHECK_THROWS_AS(quad::integrate<double>(sing, {1.0, 1.0}), DomainError);
}

TEST_CASE("result is independent of breakpoint order and duplicates") {
    auto f = [](double x) {
        V v(2);
        v << std::sin(x) / (1 + x * x), 1.0 / (1e-4 + (x - 2) * (x - 2));
        return v;
    };
    const auto a = quad::integrate<double>(f, {0.0, 2.0, 4.0});
    const auto b = quad::integrate<double>(f, {4.0, 0.0, 2.0, 2.0});
    CHECK(a.value[0] == b.value[0]);
    CHECK(a.value[1] == b.value[1]);
}
