// operators.hpp — truncated two-level-atom x Fock-space operator algebra,
// the dressed-state basis and the effective Hamiltonian.
//
// Basis ordering: product states |n, s> at index 2 n + s, where n is the
// photon number (0..n_max) and s = 0 (atom ground) or 1 (atom excited).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>

#include "pcs/params.hpp"

namespace pcs {

using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

// Cavity and atom operators on the truncated product space.
struct AtomCavityOps {
    int n_max = 0;
    int dim = 0;
    OperatorMatrix a;        // photon annihilation
    OperatorMatrix a_dag;    // photon creation
    OperatorMatrix sm;       // sigma-
    OperatorMatrix sp;       // sigma+
    OperatorMatrix sz;       // (|e><e| - |g><g|) / 2
    OperatorMatrix n;        // a^dag a
    OperatorMatrix excited;  // sigma+ sigma- = |e><e|
};

// Build the operator set. [a, a^dag] = 1 holds below the truncation edge;
// the last photon-diagonal entry deviates by construction.
AtomCavityOps make_operators(int n_max);

// Dressed-state label: the ground state |0> = |0,g> or a couplet member
// |n>_± = (i/sqrt2)(|n-1,e> ± i |n,g>), n >= 1.
struct DressedLabel {
    enum class Sign { minus, ground, plus };
    int n = 0;
    Sign sign = Sign::ground;

    static DressedLabel grd() { return {0, Sign::ground}; }
    static DressedLabel minus(int n) { return {n, Sign::minus}; }
    static DressedLabel plus(int n) { return {n, Sign::plus}; }
    std::string str() const;
    bool operator==(const DressedLabel&) const = default;
};

// Unit-norm dressed vector in the product basis.
StateVector dressed_vector(const DressedLabel& label, int n_max);

// Unitary whose columns are |0>, |1>_-, |1>_+, ..., |n_max>_-, |n_max>_+,
// followed by the leftover top state |n_max, e> that belongs to the
// truncated couplet n_max + 1.
Eigen::MatrixXcd dressed_basis(int n_max);

// Column of dressed_basis holding the labelled state.
int dressed_index(const DressedLabel& label, int n_max);

// Monochromatic two-level driving term  Upsilon(E) = i E (sigma+ - sigma-).
OperatorMatrix drive_term(double amplitude, const AtomCavityOps& ops);

// Non-Hermitian effective Hamiltonian in the frame rotating at the fixed
// drive frequency,
//   H_eff = (w - w1)(sz + n + 1/2) + i g (a^dag sm - a sp) + Upsilon(E1)
//           - i kappa n - i (gamma/2) sp sm,
// with w - w1 = g_f. The +1/2 shifts the energy zero to |0,g>, so the
// drive-free Hermitian part has dressed eigenvalues n g_f ± sqrt(n) g.
OperatorMatrix build_H_eff(const SystemParams& params);

// Same Hamiltonian with an externally supplied detuning w_rot and drive
// amplitude; used for the scanning-frame monochromatic problem where
// w - w2 = -g_f delta_tilde.
OperatorMatrix build_H_eff_frame(const SystemParams& params, double detuning, double amplitude);

} // namespace pcs
