#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "pcs/floquet.hpp"
#include "pcs/liouville.hpp"

using namespace pcs;

TEST_SUITE("liouville") {

TEST_CASE("generator parts") {
    const SystemParams p = pcstest::spectrum_params();
    const LiouvilleParts parts = build_liouville_parts(p.with_delta_tilde(1.3));
    std::mt19937_64 rng(42);

    SUBCASE("scanning drive off gives vanishing time-dependent parts") {
        const LiouvilleParts off = build_liouville_parts(p.without_drive2());
        CHECK(off.Dplus.norm() == 0.0);
        CHECK(off.Dminus.norm() == 0.0);
    }
    SUBCASE("instantaneous generator is trace free on 100 random Hermitian states") {
        const Eigen::MatrixXcd Lsum = parts.L0 + parts.Dplus + parts.Dminus;
        for (int k = 0; k < 100; ++k) {
            const Eigen::MatrixXcd rho = pcstest::random_hermitian(parts.op_dim(), rng);
            const Complex tr = unvec((Lsum * vec(rho)).eval()).trace();
            CHECK(std::abs(tr) < 1e-12 * rho.norm());
        }
    }
    SUBCASE("Hermiticity propagation identities") {
        for (int k = 0; k < 20; ++k) {
            const Eigen::MatrixXcd rho = pcstest::random_matrix(parts.op_dim(), rng);
            const Eigen::MatrixXcd lhs0 = unvec((parts.L0 * vec(rho)).eval()).adjoint();
            const Eigen::MatrixXcd rhs0 = unvec((parts.L0 * vec(rho.adjoint().eval())).eval());
            CHECK((lhs0 - rhs0).norm() < 1e-12 * rho.norm());
            const Eigen::MatrixXcd lhsp = unvec((parts.Dplus * vec(rho)).eval()).adjoint();
            const Eigen::MatrixXcd rhsp = unvec((parts.Dminus * vec(rho.adjoint().eval())).eval());
            CHECK((lhsp - rhsp).norm() < 1e-12 * rho.norm());
        }
    }
    SUBCASE("matrix-form application agrees with the superoperators") {
        for (double theta : {0.0, 0.7, 2.9}) {
            const Eigen::MatrixXcd rho = pcstest::random_matrix(parts.op_dim(), rng);
            const Complex em = std::exp(-kI * theta), ep = std::exp(kI * theta);
            const Eigen::MatrixXcd via_super =
                unvec(((parts.L0 + em * parts.Dplus + ep * parts.Dminus) * vec(rho)).eval());
            const Eigen::MatrixXcd via_mats = parts.mats.apply(rho, theta);
            CHECK((via_super - via_mats).norm() < 1e-12 * via_super.norm());
        }
    }
    SUBCASE("one integrator step preserves Hermiticity") {
        const Eigen::MatrixXcd rho = pcstest::random_density(parts.op_dim(), rng);
        // a single explicit Euler step of the full generator at fixed t
        for (double theta : {0.0, 1.1}) {
            const Eigen::MatrixXcd stepped = rho + 0.01 * parts.mats.apply(rho, theta);
            CHECK((stepped - stepped.adjoint()).norm() < 1e-12 * stepped.norm());
        }
    }
}

TEST_CASE("dressed-basis masks") {
    const SystemParams p = pcstest::three_photon_params();
    const AtomCavityOps ops = make_operators(p.n_max);
    const OperatorMatrix drive = drive_term(p.drive1, ops);
    const Eigen::MatrixXcd U = dressed_basis(p.n_max);

    const MaskEntry ground_to_1m{DressedLabel::grd(), DressedLabel::minus(1), DriveField::drive1};

    SUBCASE("empty mask is the identity transformation") {
        CHECK((apply_mask(drive, {}, p.n_max) - drive).norm() == 0.0);
    }
    SUBCASE("masking zeroes the targeted dressed element and keeps the rest") {
        const OperatorMatrix masked = apply_mask(drive, {ground_to_1m}, p.n_max);
        const Eigen::MatrixXcd dressed = U.adjoint() * masked * U;
        const int i0 = dressed_index(DressedLabel::grd(), p.n_max);
        const int i1m = dressed_index(DressedLabel::minus(1), p.n_max);
        const int i1p = dressed_index(DressedLabel::plus(1), p.n_max);
        CHECK(std::abs(dressed(i0, i1m)) < 1e-14);
        CHECK(std::abs(dressed(i1m, i0)) < 1e-14);
        const Eigen::MatrixXcd orig = U.adjoint() * drive * U;
        CHECK(std::abs(dressed(i0, i1p) - orig(i0, i1p)) < 1e-14);
        CHECK(std::abs(orig(i0, i1p)) > 1e-3);  // the untouched element is nontrivial
    }
    SUBCASE("Frobenius norm drops by exactly the removed pair") {
        const Eigen::MatrixXcd orig = U.adjoint() * drive * U;
        const int i0 = dressed_index(DressedLabel::grd(), p.n_max);
        const int i1m = dressed_index(DressedLabel::minus(1), p.n_max);
        const double removed = std::norm(orig(i0, i1m)) + std::norm(orig(i1m, i0));
        const OperatorMatrix masked = apply_mask(drive, {ground_to_1m}, p.n_max);
        const double drop = drive.squaredNorm() - masked.squaredNorm();
        CHECK(drop == doctest::Approx(removed).epsilon(1e-12));
    }
    SUBCASE("masking is idempotent") {
        const OperatorMatrix once = apply_mask(drive, {ground_to_1m}, p.n_max);
        const OperatorMatrix twice = apply_mask(once, {ground_to_1m}, p.n_max);
        CHECK((twice - once).norm() < 1e-13 * once.norm());
    }
    SUBCASE("masking every pair erases the drive") {
        std::vector<MaskEntry> all;
        std::vector<DressedLabel> labels = {DressedLabel::grd()};
        for (int n = 1; n <= p.n_max; ++n) {
            labels.push_back(DressedLabel::minus(n));
            labels.push_back(DressedLabel::plus(n));
        }
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = i + 1; j < labels.size(); ++j)
                all.push_back({labels[i], labels[j], DriveField::drive1});
        const OperatorMatrix masked = apply_mask(drive, all, p.n_max);
        // the drive only connects distinct dressed levels and never reaches
        // the leftover top state with nonzero weight beyond the mask set
        const Eigen::MatrixXcd dressed = U.adjoint() * masked * U;
        const int d = ops.dim;
        double rest = 0.0;
        for (int i = 0; i < d - 1; ++i)
            for (int j = 0; j < d - 1; ++j) rest += std::norm(dressed(i, j));
        CHECK(std::sqrt(rest) < 1e-13);
    }
    SUBCASE("out-of-range couplet rejected") {
        const MaskEntry bad{DressedLabel::grd(), DressedLabel::plus(p.n_max + 1), DriveField::drive1};
        CHECK_THROWS_AS(build_liouville_parts(p, {bad}), std::out_of_range);
    }
    SUBCASE("drive-field masks hit the intended operators") {
        // masking the scanning field must leave the fixed drive untouched
        const LiouvilleParts plain = build_liouville_parts(p);
        const MaskEntry m2 = {DressedLabel::grd(), DressedLabel::minus(1), DriveField::drive2};
        const LiouvilleParts masked = build_liouville_parts(p, {m2});
        CHECK((masked.mats.H_eff - plain.mats.H_eff).norm() == 0.0);
        CHECK((masked.Dplus - plain.Dplus).norm() > 1e-3);
    }
}

TEST_CASE("spectral decomposition of a monochromatic generator") {
    SystemParams p = pcstest::spectrum_params();
    p.n_max = 4;  // keep the eigensolve quick

    SUBCASE("undriven steady state is the dark ground state") {
        SystemParams q = p;
        q.drive1 = 0.0;
        q.drive2 = 0.0;
        const LiouvilleParts parts = build_liouville_parts(q);
        const EigenSystem sys = eigendecompose(parts.L0);
        Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(parts.op_dim(), parts.op_dim());
        expected(0, 0) = 1.0;
        CHECK((sys.steady() - expected).norm() < 1e-10);
        CHECK(sys.dim() == parts.dim());
    }

    const LiouvilleParts parts = build_liouville_parts(p.without_drive2());
    const EigenSystem sys = eigendecompose(parts.L0);

    SUBCASE("mode count and spectral stability") {
        CHECK(sys.dim() == parts.dim());
        for (int n = 0; n < sys.dim(); ++n) CHECK(sys.lambdas(n).real() >= -1e-10);
        int zero_modes = 0;
        for (int n = 0; n < sys.dim(); ++n)
            if (std::abs(sys.lambdas(n)) < 1e-10) ++zero_modes;
        CHECK(zero_modes == 1);
        CHECK(std::abs(sys.steady().trace() - Complex(1.0)) < 1e-12);
        CHECK_FALSE(sys.schur_fallback);
    }
    SUBCASE("reconstruction matches the time-domain oracle") {
        std::mt19937_64 rng(7);
        const Eigen::MatrixXcd rho0 = pcstest::random_density(parts.op_dim(), rng);
        auto rhs = [&](double, const Eigen::VectorXcd& y) {
            return vec(parts.mats.apply_static(unvec(y))).eval();
        };
        OdeOptions opts;
        opts.rel_tol = 1e-12;
        opts.abs_tol = 1e-14;
        for (double t : {0.1, 1.0, 10.0}) {
            const Eigen::VectorXcd y = integrate_ode(rhs, 0.0, t, vec(rho0), opts);
            const Eigen::MatrixXcd via_modes = sys.propagate(rho0, t);
            const Eigen::MatrixXcd via_time = unvec(y);
            CHECK((via_modes - via_time).norm() < 1e-6 * via_time.norm());
        }
    }
    SUBCASE("slowest relaxation rate matches an exponential fit of the oracle") {
        // smallest nonzero decay rate
        double gap = 1e300;
        for (int n = 0; n < sys.dim(); ++n) {
            const double re = sys.lambdas(n).real();
            if (re > 1e-8) gap = std::min(gap, re);
        }
        // fit the tail decay of the slowest eigenmode seeded as initial deviation
        int slow = -1;
        double best = 1e300;
        for (int n = 1; n < sys.dim(); ++n) {
            if (std::abs(sys.lambdas(n).imag()) > 1e-6) continue;  // pick a purely decaying mode
            if (sys.lambdas(n).real() < best && sys.lambdas(n).real() > 1e-8) {
                best = sys.lambdas(n).real();
                slow = n;
            }
        }
        REQUIRE(slow >= 0);
        Eigen::MatrixXcd dev = sys.modes[size_t(slow)];
        dev = ((dev + dev.adjoint()) / 2.0).eval();  // Hermitian deviation, zero trace
        const Eigen::MatrixXcd rho0 = sys.steady() + 0.05 * dev / dev.norm();
        auto rhs = [&](double, const Eigen::VectorXcd& y) {
            return vec(parts.mats.apply_static(unvec(y))).eval();
        };
        OdeOptions opts;
        opts.rel_tol = 1e-12;
        opts.abs_tol = 1e-15;
        const double t1 = 1.0 / best, t2 = 2.0 / best;
        const Eigen::VectorXcd y1 = integrate_ode(rhs, 0.0, t1, vec(rho0), opts);
        const Eigen::VectorXcd y2 = integrate_ode(rhs, t1, t2, y1, opts);
        const double d1 = (unvec(y1) - sys.steady()).norm();
        const double d2 = (unvec(y2) - sys.steady()).norm();
        const double fitted = std::log(d1 / d2) / (t2 - t1);
        CHECK(fitted == doctest::Approx(best).epsilon(0.01));
        CHECK(best == doctest::Approx(gap).epsilon(0.05));  // the seeded mode is the gap mode
    }
}

} // TEST_SUITE
