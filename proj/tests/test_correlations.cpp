#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pcs/correlations.hpp"

using namespace pcs;

TEST_SUITE("correlations") {

TEST_CASE("normally ordered moments") {
    const AtomCavityOps ops = make_operators(6);
    const int d = ops.dim;

    SUBCASE("vacuum gives zero") {
        Eigen::MatrixXcd vac = Eigen::MatrixXcd::Zero(d, d);
        vac(0, 0) = 1.0;
        for (int k = 1; k <= 4; ++k) CHECK(normal_ordered_moment(vac, k, 0, ops) == 0.0);
    }
    SUBCASE("two-photon Fock state") {
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
        rho(2 * 2, 2 * 2) = 1.0;  // |2, g><2, g|
        CHECK(normal_ordered_moment(rho, 2, 0, ops) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(normal_ordered_moment(rho, 1, 0, ops) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(normal_ordered_moment(rho, 3, 0, ops) == 0.0);
    }
    SUBCASE("atomic orders beyond one vanish with a degenerate flag") {
        std::mt19937_64 rng(5);
        const Eigen::MatrixXcd rho = pcstest::random_density(d, rng);
        bool degenerate = false;
        CHECK(normal_ordered_moment(rho, 2, 2, ops, &degenerate) == 0.0);
        CHECK(degenerate);
        CHECK(normal_ordered_moment(rho, 2, 1, ops, &degenerate) >= 0.0);
        CHECK_FALSE(degenerate);
    }
}

TEST_CASE("alpha coefficients") {
    SystemParams p;
    p.kappa = 1.0;
    p.gamma = 3.0;  // integer-valued powers keep the identities exact

    SUBCASE("the ell = 4 expansion coefficients") {
        CHECK(alpha_coefficient({{0, 0}}, p) == 16.0);  // (2k)^4
        CHECK(alpha_coefficient({{0, 1}}, p) == 24.0);  // (2k)^3 gamma
        CHECK(alpha_coefficient({{1, 0}}, p) == 24.0);
        CHECK(alpha_coefficient({{1, 1}}, p) == 36.0);  // (2k)^2 gamma^2
        // prefactor form: (2k)^2 x {(2k)^2, 2k gamma, 2k gamma, gamma^2}
        CHECK(alpha_coefficient({{0, 0}}, p) == 4.0 * 4.0);
        CHECK(alpha_coefficient({{0, 1}}, p) == 4.0 * 6.0);
        CHECK(alpha_coefficient({{1, 1}}, p) == 4.0 * 9.0);
    }
    SUBCASE("binomial sum identity for ell <= 6") {
        for (int ell = 2; ell <= 6; ++ell) {
            double sum = 0.0;
            const int words = 1 << (ell - 2);
            for (int w = 0; w < words; ++w) {
                KVector kv;
                for (int b = 0; b < ell - 2; ++b) kv.entries.push_back((w >> b) & 1);
                sum += alpha_coefficient(kv, p);
            }
            const double expected = std::pow(2.0 * p.kappa, 2) * std::pow(2.0 * p.kappa + p.gamma, ell - 2);
            CHECK(sum == expected);
        }
    }
    SUBCASE("invalid entries rejected") {
        CHECK_THROWS_AS(alpha_coefficient({{0, 2}}, p), std::invalid_argument);
    }
}

TEST_CASE("pair and multi-photon rates") {
    const SystemParams peak = pcstest::spectrum_params().with_delta_tilde(1.0 + std::sqrt(2.0));

    SUBCASE("zero drives give a zero pair rate") {
        SystemParams p = peak;
        p.drive1 = 0.0;
        p.drive2 = 0.0;
        CHECK(std::abs(w_pair(p).value) < 1e-14);
    }
    SUBCASE("w_multi(2) reduces to w_pair") {
        CHECK(w_multi(2, peak).value == doctest::Approx(w_pair(peak).value).epsilon(1e-14));
    }
    SUBCASE("perturbative hierarchy at weak drive") {
        double prev = -1.0;
        for (int ell : {4, 3, 2}) {
            const RateResult r = w_multi(ell, peak);
            CHECK(r.value >= -1e-12);
            CHECK(r.value >= prev);  // higher orders are smaller
            prev = r.value;
        }
    }
    SUBCASE("three-photon channels reported separately") {
        const RateResult r = w_multi(3, pcstest::three_photon_params().with_delta_tilde(0.5));
        REQUIRE(r.components.count("moment_m0") == 1);
        REQUIRE(r.components.count("moment_m1") == 1);
        const double a3 = r.components.at("moment_m0");
        const double sa2 = r.components.at("moment_m1");
        const double expect = std::pow(2.0, 3) * a3 + std::pow(2.0, 2) * 2.0 * sa2;  // kappa=1, gamma=2
        CHECK(r.value == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("truncation warning once ell exceeds the Fock space") {
        SystemParams p = peak;
        p.n_max = 3;
        CHECK(w_multi(4, p).truncation_warning);
        CHECK_FALSE(w_multi(3, p).truncation_warning);
    }
    SUBCASE("difference rate vanishes identically without the fixed field") {
        const RateResult r = difference_rate(2, peak.without_drive1());
        CHECK(r.value == 0.0);
    }
    SUBCASE("scanning-frame steady state equals the rotating-frame expansion") {
        // the monochromatic subtraction solves in the scanning frame; the
        // same problem phrased as a Bloch expansion with E1 = 0 must agree
        const SystemParams mono = peak.without_drive1();
        const auto [rho_frame, ops] = long_time_rho0(mono);
        const LiouvilleParts parts = build_liouville_parts(mono);
        const BlochExpansion bloch = solve_bloch(parts, mono.delta(), mono.m_max);
        const OperatorMatrix nsq = ops.a_dag * ops.a_dag * ops.a * ops.a;
        const double via_frame = (nsq * rho_frame).trace().real();
        const double via_bloch = (nsq * bloch.component(0)).trace().real();
        CHECK(via_frame == doctest::Approx(via_bloch).epsilon(1e-8));
    }
}

TEST_CASE("two-time pair correlator") {
    const SystemParams peak = pcstest::spectrum_params().with_delta_tilde(1.0 + std::sqrt(2.0));

    SUBCASE("negative lag rejected") {
        CHECK_THROWS_AS(two_time_pair_correlation(peak, -0.1), std::invalid_argument);
    }
    SUBCASE("zero lag reproduces the pair rate") {
        const double w2_0 = two_time_pair_correlation(peak, 0.0);
        CHECK(w2_0 == doctest::Approx(w_pair(peak).value).epsilon(1e-8));
    }
    SUBCASE("propagated path matches the spectral expansion on a static problem") {
        const SystemParams mono = peak.without_drive2();  // fixed field only
        const PairCorrelator eig = PairCorrelator::monochromatic(mono);
        const PairCorrelator ode = PairCorrelator::bichromatic(mono, 5.0);
        for (double t : {0.0, 0.1, 1.0, 5.0}) {
            CAPTURE(t);
            CHECK(ode(t) == doctest::Approx(eig(t)).epsilon(1e-8));
        }
        CHECK(ode.integral(5.0) == doctest::Approx(eig.integral(5.0)).epsilon(1e-8));
        CHECK(ode.double_integral(5.0) == doctest::Approx(eig.double_integral(5.0)).epsilon(1e-8));
    }
    SUBCASE("long lags decorrelate to the Poissonian value") {
        const PairCorrelator mono = PairCorrelator::monochromatic(peak.without_drive2());
        CHECK(mono(50.0) == doctest::Approx(mono.long_limit()).epsilon(1e-6));
    }
    SUBCASE("bichromatic correlator integrals agree with quadrature over the values") {
        const PairCorrelator pc = PairCorrelator::bichromatic(peak, 2.0);
        const double via_quad = integrate([&](double t) { return pc(t); }, 0.0, 2.0);
        CHECK(pc.integral(2.0) == doctest::Approx(via_quad).epsilon(1e-8));
    }
}

TEST_CASE("windowed rates") {
    const SystemParams peak = pcstest::spectrum_params().with_delta_tilde(1.0 + std::sqrt(2.0));
    const PairCorrelator mono = PairCorrelator::monochromatic(peak.without_drive2());
    auto w2 = [&](double t) { return mono(t); };

    SUBCASE("window limits of both forms on the analytic correlator") {
        for (double tau : {1e-3}) {
            const double con = integrate(w2, 0.0, tau) / tau;
            const double unc = windowed_rate_nested(w2, tau);
            CHECK(con == doctest::Approx(mono.short_limit()).epsilon(5e-3));
            CHECK(unc == doctest::Approx(mono.short_limit()).epsilon(5e-3));
        }
        const double tau = 1e3;
        const double con = mono.integral(tau) / tau;
        const double unc = 2.0 * mono.double_integral(tau) / (tau * tau);
        CHECK(con == doctest::Approx(mono.long_limit()).epsilon(5e-3));
        CHECK(unc == doctest::Approx(mono.long_limit()).epsilon(5e-3));
    }
    SUBCASE("intermediate windows sit between the limits") {
        const double lo = std::min(mono.short_limit(), mono.long_limit());
        const double hi = std::max(mono.short_limit(), mono.long_limit());
        const double con = mono.integral(1.0);
        CHECK(con >= lo * (1 - 1e-9));
        CHECK(con <= hi * (1 + 1e-9));
    }
    SUBCASE("raw and nested window forms agree to high accuracy") {
        QuadratureOptions opts;
        opts.abs_tol = 1e-300;
        opts.rel_tol = 1e-12;
        for (double tau : {0.1, 1.0}) {
            const double raw = windowed_rate_raw(w2, tau, opts);
            const double nested = windowed_rate_nested(w2, tau, opts);
            CHECK(raw == doctest::Approx(nested).epsilon(1e-10));
        }
    }
    SUBCASE("conditional difference rate approaches its short-window limit") {
        const double tau = 1e-3;
        const double rate = conditional_rate(peak, tau);
        const double limit = w_pair(peak).value - w_pair(peak.without_drive1()).value;
        CHECK(rate == doctest::Approx(limit).epsilon(5e-3));
    }
    SUBCASE("phase-averaging consistency: doubling the samples is stable") {
        const SystemParams strong = pcstest::three_photon_params().with_delta_tilde(1.0 + std::sqrt(2.0));
        const double r8 = conditional_rate(strong, 0.5, 8);
        const double r16 = conditional_rate(strong, 0.5, 16);
        CHECK(r8 == doctest::Approx(r16).epsilon(1e-4));
    }
    SUBCASE("unconditional nested form equals the raw double-integral oracle") {
        const double tau = 0.4;
        const double nested = unconditional_rate(peak, tau);
        const double raw = unconditional_rate_raw(peak, tau);
        CHECK(nested == doctest::Approx(raw).epsilon(1e-6));
    }
}

} // TEST_SUITE
