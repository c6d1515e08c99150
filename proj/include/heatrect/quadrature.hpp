// quadrature.hpp: Globally adaptive Gauss-Kronrod (7/15) integration of vector-valued
// integrands over a panel mesh with mandatory breakpoints

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "heatrect/errors.hpp"

namespace heatrect::quad {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
struct Options {
    Scalar rel_tol{1e-7};
    Scalar abs_tol{0};
    // Panels narrower than this are accepted as they are.
    Scalar min_width{0};
    int max_intervals{50000};
    bool throw_on_failure{true};
};

template <typename Scalar = double>
struct Result {
    VectorX<Scalar> value;
    VectorX<Scalar> error;      // per-component error estimate
    Scalar error_norm{0};       // max-norm of the error estimate
    int evaluations{0};
    int intervals{0};
    bool converged{false};
};

namespace detail {

// Kronrod 15-point abscissae (descending) and weights with the embedded 7-point Gauss weights.
template <typename Scalar>
struct GK15 {
    static constexpr std::array<double, 8> xgk{
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wgk{
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg{
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

template <typename Scalar>
struct Panel {
    Scalar a, b;
    VectorX<Scalar> value;
    VectorX<Scalar> error;
    Scalar norm{0};
};

template <typename Scalar, typename F>
Panel<Scalar> gauss_kronrod(F& f, Scalar a, Scalar b) {
    using Rule = GK15<Scalar>;
    const Scalar center = Scalar(0.5) * (a + b);
    const Scalar half = Scalar(0.5) * (b - a);

    VectorX<Scalar> fc = f(center);
    VectorX<Scalar> kronrod = fc * Scalar(Rule::wgk[7]);
    VectorX<Scalar> gauss = fc * Scalar(Rule::wg[3]);
    VectorX<Scalar> resabs = fc.cwiseAbs() * Scalar(Rule::wgk[7]);

    std::array<VectorX<Scalar>, 14> fv;
    for (int j = 0; j < 7; ++j) {
        const Scalar dx = half * Scalar(Rule::xgk[j]);
        fv[2 * j] = f(center - dx);
        fv[2 * j + 1] = f(center + dx);
        const VectorX<Scalar> sum = fv[2 * j] + fv[2 * j + 1];
        kronrod += sum * Scalar(Rule::wgk[j]);
        resabs += (fv[2 * j].cwiseAbs() + fv[2 * j + 1].cwiseAbs()) * Scalar(Rule::wgk[j]);
        if (j % 2 == 1) gauss += sum * Scalar(Rule::wg[j / 2]);
    }

    const VectorX<Scalar> mean = kronrod * Scalar(0.5);
    VectorX<Scalar> resasc = (fc - mean).cwiseAbs() * Scalar(Rule::wgk[7]);
    for (int j = 0; j < 7; ++j)
        resasc += ((fv[2 * j] - mean).cwiseAbs() + (fv[2 * j + 1] - mean).cwiseAbs()) * Scalar(Rule::wgk[j]);

    const Scalar ah = std::abs(half);
    Panel<Scalar> p{a, b, kronrod * half, VectorX<Scalar>::Zero(fc.size()), Scalar(0)};
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    for (Eigen::Index i = 0; i < fc.size(); ++i) {
        Scalar err = std::abs((kronrod[i] - gauss[i]) * half);
        const Scalar asc = resasc[i] * ah;
        if (asc != Scalar(0) && err != Scalar(0))
            err = asc * std::min(Scalar(1), std::pow(Scalar(200) * err / asc, Scalar(1.5)));
        const Scalar abs_part = resabs[i] * ah;
        if (abs_part > std::numeric_limits<Scalar>::min() / (Scalar(50) * eps))
            err = std::max(Scalar(50) * eps * abs_part, err);
        p.error[i] = err;
    }
    p.norm = p.error.cwiseAbs().maxCoeff();
    return p;
}

} // namespace detail

// Integrates f over [breakpoints.front(), breakpoints.back()]. Every breakpoint starts a
// panel; panels are bisected in order of decreasing error until
//   max_i sum_panels err_i <= max(abs_tol, rel_tol * max_i |I_i|).
// Summation runs over panels in ascending position so the result is reproducible.
template <typename Scalar, typename F>
Result<Scalar> integrate(F&& f, std::vector<Scalar> breakpoints, const Options<Scalar>& opts = {}) {
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    if (breakpoints.size() < 2) throw DomainError("quadrature: need at least two distinct breakpoints");

    std::vector<detail::Panel<Scalar>> panels;
    panels.reserve(breakpoints.size() * 4);
    auto cmp = [&panels](std::size_t l, std::size_t r) {
        if (panels[l].norm != panels[r].norm) return panels[l].norm < panels[r].norm;
        return panels[l].a > panels[r].a;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> queue(cmp);

    Result<Scalar> res;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        panels.push_back(detail::gauss_kronrod<Scalar>(f, breakpoints[i], breakpoints[i + 1]));
        res.evaluations += 15;
        queue.push(panels.size() - 1);
    }

    std::vector<char> active(panels.size(), 1);
    auto totals = [&]() {
        VectorX<Scalar> v = VectorX<Scalar>::Zero(panels.front().value.size());
        VectorX<Scalar> e = v;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            if (!active[i]) continue;
            v += panels[i].value;
            e += panels[i].error;
        }
        return std::pair{v, e};
    };

    auto [value, error] = totals();
    auto tolerance = [&]() { return std::max(opts.abs_tol, opts.rel_tol * value.cwiseAbs().maxCoeff()); };

    int live = static_cast<int>(panels.size());
    while (error.maxCoeff() > tolerance() && !queue.empty() && live < opts.max_intervals) {
        const std::size_t worst = queue.top();
        queue.pop();
        const Scalar a = panels[worst].a;
        const Scalar b = panels[worst].b;
        if (b - a <= opts.min_width) continue;  // accepted as final
        const Scalar mid = Scalar(0.5) * (a + b);
        auto left = detail::gauss_kronrod<Scalar>(f, a, mid);
        auto right = detail::gauss_kronrod<Scalar>(f, mid, b);
        res.evaluations += 30;
        value += left.value + right.value - panels[worst].value;
        error += left.error + right.error - panels[worst].error;
        active[worst] = 0;
        panels.push_back(std::move(left));
        panels.push_back(std::move(right));
        active.push_back(1);
        active.push_back(1);
        queue.push(panels.size() - 2);
        queue.push(panels.size() - 1);
        ++live;
    }

    // Deterministic final summation in ascending panel order.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < panels.size(); ++i)
        if (active[i]) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return panels[l].a < panels[r].a; });
    res.value = VectorX<Scalar>::Zero(panels.front().value.size());
    res.error = res.value;
    for (auto i : order) {
        res.value += panels[i].value;
        res.error += panels[i].error;
    }
    res.intervals = static_cast<int>(order.size());
    res.error_norm = res.error.maxCoeff();
    const Scalar tol = std::max(opts.abs_tol, opts.rel_tol * res.value.cwiseAbs().maxCoeff());
    res.converged = res.error_norm <= tol;
    if (!res.converged && opts.throw_on_failure)
        throw QuadratureError("quadrature: tolerance not reached (error estimate " + std::to_string(res.error_norm) +
                                  ", target " + std::to_string(tol) + ")",
                              static_cast<double>(res.error_norm));
    return res;
}

} // namespace heatrect::quad
