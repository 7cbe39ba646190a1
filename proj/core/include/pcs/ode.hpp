// ode.hpp — adaptive Dormand-Prince 5(4) integration for complex state
// vectors, with accepted steps recorded for dense evaluation.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace pcs {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-13;
    double h_max = 0.0;  // 0: no cap
    long max_steps = 50'000'000;
};

// One accepted step endpoint with its derivative, for Hermite interpolation.
struct OdeNode {
    double t;
    Eigen::VectorXcd y;
    Eigen::VectorXcd f;
};

namespace detail {
// Dormand-Prince coefficients.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
} // namespace detail

// Integrate dy/dt = f(t, y) from (t0, y0) to t1. When `record` is non-null,
// every accepted step endpoint is appended (including the initial point).
template <typename Rhs>
Eigen::VectorXcd integrate_ode(Rhs&& rhs, double t0, double t1, Eigen::VectorXcd y0,
                               const OdeOptions& opts = {}, std::vector<OdeNode>* record = nullptr) {
    using Vec = Eigen::VectorXcd;
    if (t1 < t0) throw std::invalid_argument("integrate_ode: t1 must be >= t0");
    double t = t0;
    Vec y = std::move(y0);
    Vec k1 = rhs(t, y);
    if (record) record->push_back({t, y, k1});
    if (t1 == t0) return y;

    double h = std::min(opts.h_init, t1 - t0);
    if (opts.h_max > 0) h = std::min(h, opts.h_max);
    long steps = 0;
    Vec k2, k3, k4, k5, k6, k7, y5;

    while (t < t1) {
        if (++steps > opts.max_steps) throw std::runtime_error("integrate_ode: step budget exhausted");
        if (t + h > t1) h = t1 - t;
        using namespace detail;
        k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = rhs(t + h, y5);

        const Vec err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale = opts.abs_tol + opts.rel_tol * std::max(y.norm(), y5.norm());
        const double err = err_vec.norm() / scale;

        if (err <= 1.0) {
            t += h;
            y.swap(y5);
            k1.swap(k7);  // FSAL
            if (record) record->push_back({t, y, k1});
        }
        double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        factor = std::min(5.0, std::max(0.2, factor));
        h *= factor;
        if (opts.h_max > 0) h = std::min(h, opts.h_max);
        if (h < opts.h_min) throw std::runtime_error("integrate_ode: step size underflow");
    }
    return y;
}

// Cubic Hermite evaluation on recorded nodes; t must lie inside the record.
Eigen::VectorXcd inline ode_dense_eval(const std::vector<OdeNode>& nodes, double t) {
    if (nodes.empty()) throw std::invalid_argument("ode_dense_eval: empty record");
    if (t <= nodes.front().t) return nodes.front().y;
    if (t >= nodes.back().t) return nodes.back().y;
    // binary search for the bracketing step
    std::size_t lo = 0, hi = nodes.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (nodes[mid].t <= t) lo = mid; else hi = mid;
    }
    const auto& n0 = nodes[lo];
    const auto& n1 = nodes[hi];
    const double h = n1.t - n0.t;
    const double s = (t - n0.t) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * n0.y + (h10 * h) * n0.f + h01 * n1.y + (h11 * h) * n1.f;
}

} // namespace pcs
