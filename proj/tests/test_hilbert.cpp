#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "pcs/operators.hpp"

using namespace pcs;

TEST_SUITE("hilbert") {

TEST_CASE("ladder and atomic operators") {
    const AtomCavityOps ops = make_operators(6);

    SUBCASE("matrix element <1|a|2> = sqrt(2)") {
        // product index 2 n + s, atom ground s = 0
        CHECK(ops.a(2 * 1, 2 * 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    }
    SUBCASE("sigma-minus squared vanishes") {
        CHECK((ops.sm * ops.sm).norm() == 0.0);
    }
    SUBCASE("commutator [a, a^dag] is identity below the truncation edge") {
        const OperatorMatrix comm = ops.a * ops.a_dag - ops.a_dag * ops.a;
        for (int n = 0; n < ops.n_max; ++n)
            for (int s = 0; s < 2; ++s) CHECK(std::abs(comm(2 * n + s, 2 * n + s) - 1.0) < 1e-14);
        // last diagonal entries deviate: a^dag annihilates the top Fock state
        for (int s = 0; s < 2; ++s)
            CHECK(std::abs(comm(2 * ops.n_max + s, 2 * ops.n_max + s) + double(ops.n_max)) < 1e-13);
        // off-diagonal exactly zero
        OperatorMatrix off = comm;
        off.diagonal().setZero();
        CHECK(off.norm() == 0.0);
    }
    SUBCASE("n = a^dag a and the excited projector") {
        CHECK((ops.n - ops.a_dag * ops.a).norm() == 0.0);
        CHECK((ops.excited * ops.excited - ops.excited).norm() < 1e-15);
    }
    SUBCASE("invalid truncation rejected") {
        CHECK_THROWS_AS(make_operators(1), std::invalid_argument);
    }
}

TEST_CASE("dressed states") {
    const int n_max = 6;

    SUBCASE("unit norm and orthogonality") {
        for (int n = 1; n <= n_max; ++n) {
            const StateVector vm = dressed_vector(DressedLabel::minus(n), n_max);
            const StateVector vp = dressed_vector(DressedLabel::plus(n), n_max);
            CHECK(std::abs(vm.norm() - 1.0) < 1e-15);
            CHECK(std::abs(vp.norm() - 1.0) < 1e-15);
            CHECK(std::abs(vm.dot(vp)) < 1e-15);
        }
        const Eigen::MatrixXcd U = dressed_basis(n_max);
        CHECK((U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols())).norm() < 1e-14);
    }
    SUBCASE("out of range label") {
        CHECK_THROWS_AS(dressed_vector(DressedLabel::plus(n_max + 1), n_max), std::out_of_range);
    }

    // Hermitian drive-free Hamiltonian: eigenvalues n g_f ± sqrt(n) g
    SystemParams p;
    p.g_f = 9.0;
    p.g = 7.3;
    p.kappa = 0.0;
    p.gamma = 0.0;
    p.drive1 = 0.0;
    p.drive2 = 0.0;
    p.n_max = n_max;
    const OperatorMatrix H = build_H_eff(p);

    SUBCASE("couplet eigenvectors") {
        for (int n = 1; n <= n_max; ++n) {
            for (auto sign : {DressedLabel::Sign::minus, DressedLabel::Sign::plus}) {
                const StateVector v = dressed_vector({n, sign}, n_max);
                const double s = (sign == DressedLabel::Sign::plus) ? 1.0 : -1.0;
                const double ev = n * p.g_f + s * std::sqrt(double(n)) * p.g;
                CHECK((H * v - ev * v).norm() < 1e-12);
            }
        }
    }
    SUBCASE("resonance of the lower first couplet at g = g_f") {
        const SystemParams pr = [&] { auto q = p; q.g = q.g_f; return q; }();
        const OperatorMatrix Hr = build_H_eff(pr);
        const StateVector v = dressed_vector(DressedLabel::minus(1), n_max);
        CHECK(std::abs((v.adjoint() * Hr * v).value()) < 1e-12);  // g_f - g_f = 0
    }
    SUBCASE("second couplet upper eigenvalue 2 g_f + sqrt2 g") {
        const StateVector v = dressed_vector(DressedLabel::plus(2), n_max);
        const Complex ev = (v.adjoint() * H * v).value();
        CHECK(std::abs(ev - (2.0 * p.g_f + std::sqrt(2.0) * p.g)) < 1e-12);
    }
    SUBCASE("spectrum against an independent diagonalization") {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
        std::vector<double> expected = {0.0, p.g_f * (n_max + 1)};  // ground + leftover top state
        for (int n = 1; n <= n_max; ++n) {
            expected.push_back(n * p.g_f - std::sqrt(double(n)) * p.g);
            expected.push_back(n * p.g_f + std::sqrt(double(n)) * p.g);
        }
        std::sort(expected.begin(), expected.end());
        REQUIRE(int(expected.size()) == solver.eigenvalues().size());
        for (int i = 0; i < solver.eigenvalues().size(); ++i)
            CHECK(solver.eigenvalues()(i) == doctest::Approx(expected[size_t(i)]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("effective Hamiltonian structure") {
    SystemParams p = pcstest::spectrum_params();
    const AtomCavityOps ops = make_operators(p.n_max);
    const OperatorMatrix H = build_H_eff(p);

    SUBCASE("anti-Hermitian part is the decay term") {
        const OperatorMatrix anti = H - H.adjoint();
        const OperatorMatrix expected = -2.0 * kI * (p.kappa * ops.n + 0.5 * p.gamma * ops.excited);
        CHECK((anti - expected).norm() < 1e-14);
    }
    SUBCASE("excitation number conserved without the drive") {
        SystemParams q = p;
        q.drive1 = 0.0;
        const OperatorMatrix H0 = build_H_eff(q);
        const OperatorMatrix N = ops.excited + ops.n;
        CHECK((H0 * N - N * H0).norm() < 1e-12);
    }
    SUBCASE("drive breaks excitation conservation") {
        const OperatorMatrix N = ops.excited + ops.n;
        CHECK((H * N - N * H).norm() > 1e-3);
    }
}

} // TEST_SUITE
