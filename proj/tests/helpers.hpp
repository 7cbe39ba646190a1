// helpers.hpp — shared fixtures for the test suites.

#pragma once

#include <random>

#include "pcs/liouville.hpp"
#include "pcs/params.hpp"

namespace pcstest {

// broadened-spectrum parameter set: E1 = E2 = kappa/2, g_f = 9, gamma = 2
inline pcs::SystemParams spectrum_params() {
    pcs::SystemParams p;
    p.g_f = 9.0;
    p.g = 9.0;
    p.kappa = 1.0;
    p.gamma = 2.0;
    p.drive1 = 0.5;
    p.drive2 = 0.5;
    p.n_max = 6;
    p.m_max = 3;
    return p;
}

// three-photon parameter set: E1 = kappa/sqrt2, E2 = sqrt2 kappa, g = g_f = 9
inline pcs::SystemParams three_photon_params() {
    pcs::SystemParams p = spectrum_params();
    p.drive1 = 1.0 / std::sqrt(2.0);
    p.drive2 = std::sqrt(2.0);
    return p;
}

inline Eigen::MatrixXcd random_matrix(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = pcs::Complex(nd(rng), nd(rng));
    return A;
}

inline Eigen::MatrixXcd random_hermitian(int d, std::mt19937_64& rng) {
    const Eigen::MatrixXcd A = random_matrix(d, rng);
    return ((A + A.adjoint()) / 2.0).eval();
}

// positive, unit-trace density matrix
inline Eigen::MatrixXcd random_density(int d, std::mt19937_64& rng) {
    const Eigen::MatrixXcd A = random_matrix(d, rng);
    Eigen::MatrixXcd rho = A * A.adjoint();
    return (rho / rho.trace()).eval();
}

} // namespace pcstest
