#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "nlgrav/errors.hpp"

namespace nlgrav::quad {

struct Options {
    double abs_tol = 1e-300;
    double rel_tol = 1e-13;
    std::size_t max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr double kronrod_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kronrod_w[7];
    double gauss = fc * gauss_w[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_x[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kronrod_w[j] * sum;
        if (j % 2 == 1) gauss += gauss_w[j / 2] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature over the panels delimited by
/// `breakpoints` (sorted, at least two entries). Throws NumericalError with the
/// worst remaining panels when the tolerance cannot be met.
template <class F>
Result integrate(F&& f, std::span<const double> breakpoints, const Options& opt = {}) {
    if (breakpoints.size() < 2) throw DomainError("quadrature needs at least two breakpoints");
    std::priority_queue<detail::Panel> heap;
    Result r;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) continue;
        auto p = detail::gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]);
        r.value += p.value;
        r.error += p.error;
        r.evaluations += 15;
        heap.push(p);
    }
    const double span_width = breakpoints.back() - breakpoints.front();
    auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(r.value)); };
    while (r.error > tolerance() && heap.size() < opt.max_intervals) {
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a < 1e-14 * span_width || mid <= worst.a || mid >= worst.b) break;
        heap.pop();
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        r.evaluations += 30;
        r.value += left.value + right.value - worst.value;
        r.error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum from scratch to drop accumulated update roundoff.
    r.intervals = heap.size();
    double value = 0.0, error = 0.0;
    std::vector<detail::Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const auto& x, const auto& y) { return x.a < y.a; });
    for (const auto& p : panels) {
        value += p.value;
        error += p.error;
    }
    r.value = value;
    r.error = error;
    // Panels whose estimate is already at the roundoff floor are not a failure.
    const double roundoff_floor = 50.0 * 2.2e-16 * std::abs(r.value);
    if (!std::isfinite(r.value) || r.error > std::max(tolerance(), roundoff_floor)) {
        std::ostringstream diag;
        diag.precision(6);
        diag << "value=" << r.value << " error_estimate=" << r.error
             << " tolerance=" << tolerance() << " intervals=" << r.intervals
             << " evaluations=" << r.evaluations << "; worst panels:";
        std::sort(panels.begin(), panels.end(),
                  [](const auto& x, const auto& y) { return x.error > y.error; });
        for (std::size_t i = 0; i < std::min<std::size_t>(5, panels.size()); ++i) {
            diag << " [" << panels[i].a << ", " << panels[i].b << "] err=" << panels[i].error;
        }
        throw NumericalError("adaptive quadrature did not converge", diag.str());
    }
    return r;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    const double pts[2] = {a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts), opt);
}

}  // namespace nlgrav::quad
