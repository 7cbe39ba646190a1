// floquet.hpp — long-time Bloch expansion of the density matrix under the
// bichromatic drive, the monochromatic steady state, and a brute-force
// time-domain oracle.
//
// Expansion convention:  rho(t) -> sum_m rho_m e^{i m delta t}  (|m| <= M),
// which with L(t) = L0 + Dplus e^{-i delta t} + Dminus e^{+i delta t} gives
// the harmonic-balance equations
//   (L0 - i m delta) rho_m + Dplus rho_{m+1} + Dminus rho_{m-1} = 0,
// closed by rho_{±(M+1)} = 0 and Tr rho_0 = 1.

#pragma once

#include <vector>

#include "pcs/liouville.hpp"
#include "pcs/ode.hpp"

namespace pcs {

struct BlochExpansion {
    int m_max = 0;
    double delta = 0.0;
    std::vector<OperatorMatrix> comps;  // index m + m_max
    double residual = 0.0;              // harmonic-balance residual (relative)

    const OperatorMatrix& component(int m) const { return comps.at(static_cast<std::size_t>(m + m_max)); }
    // rho at drive phase theta = delta * t
    OperatorMatrix at_phase(double theta) const;
};

// Block-tridiagonal forward/backward elimination (the matrix
// continued-fraction method). E2 = 0 collapses to the steady state of L0;
// delta = 0 folds the drive into a static generator.
BlochExpansion solve_bloch(const LiouvilleParts& parts, double delta, int m_max);

BlochExpansion solve_bloch(const SystemParams& params, const TransitionMask& mask = {});

// Unit-trace null state of a time-independent generator; Hermitian and
// positive up to truncation error.
OperatorMatrix steady_state(const Eigen::MatrixXcd& L0);

struct Trajectory {
    std::vector<double> times;
    std::vector<OperatorMatrix> states;
};

// Adaptive integration of d rho/dt = L(t) rho from rho(0) = |0,g><0,g|,
// sampled at `samples` uniform times. Verification oracle for the solvers.
Trajectory time_domain_oracle(const LiouvilleParts& parts, double delta, double t_final, int samples,
                              double tol = 1e-10);

// Long-time cycle average of Tr(O rho(t)): settle to t_settle, then average
// over one drive period (the instantaneous value when the drive is static).
double cycle_average(const LiouvilleParts& parts, double delta, const OperatorMatrix& O, double t_settle,
                     double tol = 1e-10);

struct ConvergenceReport {
    int n_max = 0;
    int m_max = 0;
    double value = 0.0;  // converged <: n^2 :>
};

// Smallest truncations for which <: n^2 :> is stable to rel_tol against
// raising either order. Diagnostic error if nothing converges by n_max = 14.
ConvergenceReport convergence_check(const SystemParams& params, double rel_tol = 1e-6);

} // namespace pcs
