#include <doctest.h>

#include <cmath>
#include <complex>

#include "pcs/correlations.hpp"
#include "pcs/ode.hpp"
#include "pcs/quadrature.hpp"

using pcs::Complex;

TEST_SUITE("numerics") {

TEST_CASE("dormand-prince hits analytic solutions") {
    pcs::OdeOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-14;

    SUBCASE("exponential decay") {
        auto rhs = [](double, const Eigen::VectorXcd& y) { return (-1.0 * y).eval(); };
        Eigen::VectorXcd y0(1);
        y0(0) = 1.0;
        const auto y = pcs::integrate_ode(rhs, 0.0, 5.0, y0, opts);
        CHECK(std::abs(y(0) - std::exp(-5.0)) < 1e-11);
    }
    SUBCASE("rotating phase keeps unit modulus") {
        const Complex iw(0.0, 3.0);
        auto rhs = [&](double, const Eigen::VectorXcd& y) { return (iw * y).eval(); };
        Eigen::VectorXcd y0(1);
        y0(0) = 1.0;
        const auto y = pcs::integrate_ode(rhs, 0.0, 20.0, y0, opts);
        CHECK(std::abs(std::abs(y(0)) - 1.0) < 1e-10);
        CHECK(std::abs(y(0) - std::exp(iw * 20.0)) < 1e-8);
    }
    SUBCASE("dense record interpolates between steps") {
        auto rhs = [](double t, const Eigen::VectorXcd& y) {
            Eigen::VectorXcd f(1);
            f(0) = std::cos(t) - 0.0 * y(0);
            return f;
        };
        Eigen::VectorXcd y0 = Eigen::VectorXcd::Zero(1);
        std::vector<pcs::OdeNode> nodes;
        pcs::integrate_ode(rhs, 0.0, 6.0, y0, opts, &nodes);
        // cubic Hermite dense output is one order below the integrator
        for (double t : {0.37, 1.91, 4.44}) {
            const auto y = pcs::ode_dense_eval(nodes, t);
            CHECK(std::abs(y(0) - std::sin(t)) < 2e-7);
        }
        pcs::OdeOptions capped = opts;
        capped.h_max = 0.02;
        nodes.clear();
        pcs::integrate_ode(rhs, 0.0, 6.0, y0, capped, &nodes);
        for (double t : {0.37, 1.91, 4.44}) {
            const auto y = pcs::ode_dense_eval(nodes, t);
            CHECK(std::abs(y(0) - std::sin(t)) < 1e-9);  // ~ h^4/384
        }
    }
    SUBCASE("step underflow reported") {
        // unresolvable discontinuity-like stiffness via absurd tolerance
        auto rhs = [](double t, const Eigen::VectorXcd& y) { return (1e18 * std::sin(1e12 * t) * y).eval(); };
        Eigen::VectorXcd y0(1);
        y0(0) = 1.0;
        pcs::OdeOptions tight;
        tight.rel_tol = 1e-14;
        tight.abs_tol = 1e-16;
        tight.h_min = 1e-6;
        CHECK_THROWS_AS(pcs::integrate_ode(rhs, 0.0, 1.0, y0, tight), std::runtime_error);
    }
}

TEST_CASE("adaptive quadrature") {
    SUBCASE("polynomial is near exact") {
        const double v = pcs::integrate([](double x) { return x * x * x; }, 0.0, 1.0);
        CHECK(std::abs(v - 0.25) < 1e-14);
    }
    SUBCASE("sine over half period") {
        const double v = pcs::integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
        CHECK(std::abs(v - 2.0) < 1e-13);
    }
    SUBCASE("oscillatory integrand meets a tight tolerance") {
        pcs::QuadratureOptions opts;
        opts.abs_tol = 1e-300;
        opts.rel_tol = 1e-12;
        const double v = pcs::integrate([](double x) { return std::exp(-x) * std::cos(40.0 * x); }, 0.0, 3.0, opts);
        const double exact = (1.0 - std::exp(-3.0) * (std::cos(120.0) - 40.0 * std::sin(120.0))) / 1601.0;
        CHECK(std::abs(v - exact) < 1e-12 * std::abs(exact) + 1e-16);
    }
    SUBCASE("non-convergence carries a residual estimate") {
        pcs::QuadratureOptions opts;
        opts.abs_tol = 1e-300;
        opts.rel_tol = 1e-15;
        opts.max_panels = 4;
        CHECK_THROWS_WITH_AS(
            (void)pcs::integrate([](double x) { return std::cos(200.0 * x * x); }, 0.0, 10.0, opts),
            doctest::Contains("residual"), std::runtime_error);
    }
}

TEST_CASE("window kernels match their defining expressions") {
    auto phi1_ref = [](Complex mu) { return (1.0 - std::exp(-mu)) / mu; };
    auto phi2_ref = [](Complex mu) { return ((std::exp(-mu) - 1.0) / mu + 1.0) / mu; };

    for (Complex mu : {Complex(0.3, 0.0), Complex(2.0, -5.0), Complex(0.01, 0.02)}) {
        CHECK(std::abs(pcs::phi1(mu) - phi1_ref(mu)) < 1e-13);
        CHECK(std::abs(pcs::phi2(mu) - phi2_ref(mu)) < 1e-13);
    }
    // series branch continuous across the switch
    for (double m : {0.99e-4, 1.01e-4}) {
        const Complex mu(m, m / 3.0);
        CHECK(std::abs(pcs::phi1(mu) - phi1_ref(mu)) < 1e-12);
        CHECK(std::abs(pcs::phi2(mu) - phi2_ref(mu)) < 1e-12);
    }
    // limits
    CHECK(std::abs(pcs::phi1(Complex(1e-9, 0.0)) - 1.0) < 1e-8);
    CHECK(std::abs(pcs::phi2(Complex(1e-9, 0.0)) - 0.5) < 1e-8);
}

} // TEST_SUITE
