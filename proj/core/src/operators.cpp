#include "pcs/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace pcs {

AtomCavityOps make_operators(int n_max) {
    if (n_max < 2) throw std::invalid_argument("make_operators: invalid truncation, n_max must be >= 2");
    const int dim = 2 * (n_max + 1);
    AtomCavityOps ops;
    ops.n_max = n_max;
    ops.dim = dim;
    ops.a = OperatorMatrix::Zero(dim, dim);
    ops.sm = OperatorMatrix::Zero(dim, dim);
    ops.sz = OperatorMatrix::Zero(dim, dim);

    auto idx = [](int n, int s) { return 2 * n + s; };
    for (int n = 0; n <= n_max; ++n) {
        for (int s = 0; s < 2; ++s) {
            if (n >= 1) ops.a(idx(n - 1, s), idx(n, s)) = std::sqrt(double(n));
            ops.sz(idx(n, s), idx(n, s)) = (s == 1) ? 0.5 : -0.5;
        }
        ops.sm(idx(n, 0), idx(n, 1)) = 1.0;
    }
    ops.a_dag = ops.a.adjoint();
    ops.sp = ops.sm.adjoint();
    ops.n = ops.a_dag * ops.a;
    ops.excited = ops.sp * ops.sm;
    return ops;
}

std::string DressedLabel::str() const {
    if (sign == Sign::ground) return "0";
    return std::to_string(n) + (sign == Sign::plus ? "p" : "m");
}

StateVector dressed_vector(const DressedLabel& label, int n_max) {
    if (label.n > n_max || label.n < 0)
        throw std::out_of_range("dressed_vector: couplet index outside truncation");
    const int dim = 2 * (n_max + 1);
    StateVector v = StateVector::Zero(dim);
    auto idx = [](int n, int s) { return 2 * n + s; };
    if (label.sign == DressedLabel::Sign::ground) {
        if (label.n != 0) throw std::invalid_argument("dressed_vector: ground label requires n = 0");
        v(idx(0, 0)) = 1.0;
        return v;
    }
    if (label.n < 1) throw std::invalid_argument("dressed_vector: couplet label requires n >= 1");
    const double s = (label.sign == DressedLabel::Sign::plus) ? 1.0 : -1.0;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    v(idx(label.n - 1, 1)) = kI * inv_sqrt2;        // i/sqrt2 |n-1, e>
    v(idx(label.n, 0)) = -s * inv_sqrt2;            // ± i * i/sqrt2 |n, g>
    return v;
}

Eigen::MatrixXcd dressed_basis(int n_max) {
    const int dim = 2 * (n_max + 1);
    Eigen::MatrixXcd U(dim, dim);
    U.col(0) = dressed_vector(DressedLabel::grd(), n_max);
    for (int n = 1; n <= n_max; ++n) {
        U.col(2 * n - 1) = dressed_vector(DressedLabel::minus(n), n_max);
        U.col(2 * n) = dressed_vector(DressedLabel::plus(n), n_max);
    }
    // leftover top state |n_max, e>, orthogonal to every couplet above
    StateVector top = StateVector::Zero(dim);
    top(2 * n_max + 1) = 1.0;
    U.col(dim - 1) = top;
    return U;
}

int dressed_index(const DressedLabel& label, int n_max) {
    if (label.n > n_max) throw std::out_of_range("dressed_index: couplet index outside truncation");
    if (label.sign == DressedLabel::Sign::ground) return 0;
    return 2 * label.n - (label.sign == DressedLabel::Sign::minus ? 1 : 0);
}

OperatorMatrix drive_term(double amplitude, const AtomCavityOps& ops) {
    return kI * amplitude * (ops.sp - ops.sm);
}

OperatorMatrix build_H_eff_frame(const SystemParams& params, double detuning, double amplitude) {
    params.validate_structure();
    const AtomCavityOps ops = make_operators(params.n_max);
    const int dim = ops.dim;
    OperatorMatrix H = detuning * (ops.sz + ops.n + 0.5 * OperatorMatrix::Identity(dim, dim));
    H += kI * params.g * (ops.a_dag * ops.sm - ops.a * ops.sp);
    H += drive_term(amplitude, ops);
    H -= kI * params.kappa * ops.n;
    H -= kI * (params.gamma / 2.0) * ops.excited;
    return H;
}

OperatorMatrix build_H_eff(const SystemParams& params) {
    return build_H_eff_frame(params, params.detuning1(), params.drive1);
}

} // namespace pcs
