// quadrature.hpp — globally adaptive Gauss-Legendre quadrature with an
// embedded 7/15-point error estimate.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace pcs {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-8;
    int max_panels = 4000;
};

namespace detail {

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.
inline GaussRule gauss_legendre(int order) {
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

inline const GaussRule& rule7() {
    static const GaussRule r = gauss_legendre(7);
    return r;
}
inline const GaussRule& rule15() {
    static const GaussRule r = gauss_legendre(15);
    return r;
}

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename F>
Panel evaluate_panel(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double i7 = 0.0, i15 = 0.0;
    for (int k = 0; k < 7; ++k) i7 += rule7().weights[k] * f(mid + half * rule7().nodes[k]);
    for (int k = 0; k < 15; ++k) i15 += rule15().weights[k] * f(mid + half * rule15().nodes[k]);
    i7 *= half;
    i15 *= half;
    return {a, b, i15, std::abs(i15 - i7)};
}

} // namespace detail

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
};

// Globally adaptive: repeatedly bisect the panel with the largest error
// until the summed estimate meets the absolute or relative tolerance.
template <typename F>
QuadratureResult integrate_tol(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    if (!(b >= a)) throw std::invalid_argument("integrate: bad interval");
    QuadratureResult res;
    if (a == b) return res;

    std::priority_queue<detail::Panel> heap;
    heap.push(detail::evaluate_panel(f, a, b));
    double total = heap.top().value;
    double err = heap.top().error;
    int panels = 1;

    while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (panels >= opts.max_panels) {
            throw std::runtime_error("integrate: quadrature did not converge, residual estimate " +
                                     std::to_string(err));
        }
        const detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::evaluate_panel(f, worst.a, mid);
        auto right = detail::evaluate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    res.value = total;
    res.error_estimate = err;
    res.panels = panels;
    return res;
}

template <typename F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    return integrate_tol(std::forward<F>(f), a, b, opts).value;
}

} // namespace pcs
