// liouville.hpp — master-equation superoperator parts, dressed-basis
// transition masks, and spectral decomposition of time-independent
// Liouvilleans.
//
// The generator splits as  L(t) = L0 + Dplus e^{-i delta t} + Dminus e^{+i delta t},
//   L0 rho    = -i (H_eff rho - rho H_eff^dag) + 2 kappa a rho a^dag + gamma sm rho sp
//   Dplus rho = E2 [sp, rho],   Dminus rho = -E2 [sm, rho],
// the Hermitian rotating-frame reading of the scanning drive: both parts
// together equal -i [Upsilon(E2), rho] at delta = 0 and satisfy
// (Dplus rho)^dag = Dminus(rho^dag).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "pcs/operators.hpp"

namespace pcs {

enum class DriveField { drive1, drive2 };

struct MaskEntry {
    DressedLabel from;
    DressedLabel to;
    DriveField field = DriveField::drive1;
};
using TransitionMask = std::vector<MaskEntry>;

// --------------------------- superoperator helpers ---------------------------
// Column stacking: vec(A rho B) = (B^T kron A) vec(rho).

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);
Eigen::MatrixXcd spre(const OperatorMatrix& A);   // rho -> A rho
Eigen::MatrixXcd spost(const OperatorMatrix& B);  // rho -> rho B
Eigen::MatrixXcd sandwich(const OperatorMatrix& A, const OperatorMatrix& B);  // rho -> A rho B

inline Eigen::Map<const Eigen::VectorXcd> vec(const OperatorMatrix& rho) {
    return {rho.data(), rho.size()};
}
inline OperatorMatrix unvec(const Eigen::VectorXcd& v) {
    const int d = static_cast<int>(std::lround(std::sqrt(double(v.size()))));
    return Eigen::Map<const OperatorMatrix>(v.data(), d, d);
}

// ------------------------------ generator parts ------------------------------

// Operator (D x D) form of the generator; the superoperator matrices are
// assembled from the same members, so both application paths agree.
struct GeneratorMats {
    SystemParams params;
    AtomCavityOps ops;
    OperatorMatrix H_eff;      // includes the (possibly masked) fixed drive
    OperatorMatrix drive2_sp;  // masked sigma+ used by the scanning drive
    OperatorMatrix drive2_sm;  // its adjoint

    // d rho / dt with the scanning-drive phase theta = delta * t.
    OperatorMatrix apply(const OperatorMatrix& rho, double theta) const;
    // L0 rho (scanning drive off).
    OperatorMatrix apply_static(const OperatorMatrix& rho) const;
};

struct LiouvilleParts {
    GeneratorMats mats;
    Eigen::MatrixXcd L0;      // E1 drive + decay + jump term
    Eigen::MatrixXcd Dplus;   // coefficient of e^{-i delta t}
    Eigen::MatrixXcd Dminus;  // coefficient of e^{+i delta t}

    int dim() const { return static_cast<int>(L0.rows()); }
    int op_dim() const { return mats.ops.dim; }
};

// Assemble the parts in the fixed-field rotating frame. Masked drive matrix
// elements are zeroed in the dressed basis before superoperator construction;
// the jump term is never modified.
LiouvilleParts build_liouville_parts(const SystemParams& params, const TransitionMask& mask = {});

// Time-independent Liouvillean of the scanning-frame monochromatic problem
// (E1 = 0): detuning -g_f delta_tilde, static drive E2. Only drive2 mask
// entries apply.
LiouvilleParts build_monochromatic_parts(const SystemParams& params, const TransitionMask& mask = {});

// Transform to the dressed basis, zero each listed element pair (both
// (from,to) and (to,from)), transform back. Idempotent.
OperatorMatrix apply_mask(const OperatorMatrix& drive_op, const std::vector<MaskEntry>& entries, int n_max);

// ---------------------------- spectral decomposition ----------------------------

// Modes of a time-independent generator L: eigenvalues are -lambda_n with
// Re lambda_n >= 0; the unique steady mode comes first, trace-normalized.
struct EigenSystem {
    Eigen::VectorXcd lambdas;             // sorted by |Re| ascending
    std::vector<Eigen::MatrixXcd> modes;  // right eigenmodes as D x D matrices
    Eigen::MatrixXcd basis;               // columns vec(modes[n])
    Eigen::PartialPivLU<Eigen::MatrixXcd> basis_lu;
    double basis_condition = 0.0;  // rough cond(basis); large when near-defective
    bool schur_fallback = false;   // set when the eigenbasis was unusable
    Eigen::MatrixXcd generator;    // retained for the fallback propagator

    int dim() const { return static_cast<int>(lambdas.size()); }
    const Eigen::MatrixXcd& steady() const { return modes.front(); }

    // Expansion coefficients of an operator in the mode basis.
    Eigen::VectorXcd expand(const OperatorMatrix& rho0) const;
    // e^{L t} rho0 via the mode expansion (or matrix exponential fallback).
    OperatorMatrix propagate(const OperatorMatrix& rho0, double t) const;
};

EigenSystem eigendecompose(const Eigen::MatrixXcd& L);

} // namespace pcs
