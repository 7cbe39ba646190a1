#include "pcs/floquet.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace pcs {

namespace {

// Permutation taking vec(rho) to vec(rho^T); with conjugation it gives the
// adjoint: vec(rho^dag) = P conj(vec rho).
Eigen::MatrixXcd transpose_permutation(int d) {
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) P(a + b * d, b + a * d) = 1.0;
    return P;
}

// Solve A x = 0 with Tr unvec(x) = 1 by replacing the first row with the
// trace functional; falls back to an augmented least-squares solve.
Eigen::VectorXcd solve_null_unit_trace(const Eigen::MatrixXcd& A) {
    const int n = static_cast<int>(A.rows());
    const int d = static_cast<int>(std::lround(std::sqrt(double(n))));
    Eigen::RowVectorXcd trace_row = Eigen::RowVectorXcd::Zero(n);
    for (int j = 0; j < d; ++j) trace_row(j * d + j) = 1.0;

    Eigen::MatrixXcd B = A;
    B.row(0) = trace_row;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(0) = 1.0;
    Eigen::VectorXcd x = Eigen::PartialPivLU<Eigen::MatrixXcd>(B).solve(rhs);

    const double scale = A.norm() * x.norm() + 1e-300;
    bool ok = x.allFinite() && (A * x).norm() / scale < 1e-9 &&
              std::abs((trace_row * x).value() - Complex(1.0)) < 1e-9;
    if (!ok) {
        Eigen::MatrixXcd Aug(n + 1, n);
        Aug.topRows(n) = A;
        Aug.row(n) = trace_row;
        Eigen::VectorXcd rhs2 = Eigen::VectorXcd::Zero(n + 1);
        rhs2(n) = 1.0;
        x = Aug.colPivHouseholderQr().solve(rhs2);
        ok = x.allFinite() && (A * x).norm() / (A.norm() * x.norm() + 1e-300) < 1e-8;
        if (!ok) throw std::runtime_error("solve_null_unit_trace: numerical singularity");
    }
    return x;
}

} // namespace

OperatorMatrix BlochExpansion::at_phase(double theta) const {
    OperatorMatrix out = component(0);
    for (int m = 1; m <= m_max; ++m) {
        const Complex ph = std::exp(kI * (double(m) * theta));
        out += ph * component(m) + std::conj(ph) * component(-m);
    }
    return out;
}

OperatorMatrix steady_state(const Eigen::MatrixXcd& L0) {
    return unvec(solve_null_unit_trace(L0));
}

BlochExpansion solve_bloch(const LiouvilleParts& parts, double delta, int m_max) {
    if (m_max < 1) throw std::invalid_argument("solve_bloch: m_max must be >= 1");
    const int n = parts.dim();
    const bool driven = parts.mats.params.drive2 != 0.0;

    BlochExpansion bloch;
    bloch.m_max = m_max;
    bloch.delta = delta;
    bloch.comps.assign(static_cast<std::size_t>(2 * m_max + 1), OperatorMatrix::Zero(parts.op_dim(), parts.op_dim()));

    if (!driven) {
        bloch.comps[static_cast<std::size_t>(m_max)] = steady_state(parts.L0);
        return bloch;
    }
    if (delta == 0.0) {
        // degenerate bichromatic drive: both components at the same frequency
        bloch.comps[static_cast<std::size_t>(m_max)] = steady_state(parts.L0 + parts.Dplus + parts.Dminus);
        return bloch;
    }

    // downward sweep: rho_m = S_m rho_{m-1} for m = M..1
    std::vector<Eigen::MatrixXcd> S(static_cast<std::size_t>(m_max) + 1);
    for (int m = m_max; m >= 1; --m) {
        Eigen::MatrixXcd A = parts.L0;
        A.diagonal().array() -= kI * (double(m) * delta);
        if (m < m_max) A += parts.Dplus * S[static_cast<std::size_t>(m + 1)];
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
        S[static_cast<std::size_t>(m)] = -lu.solve(parts.Dminus);
        if (!S[static_cast<std::size_t>(m)].allFinite())
            throw std::runtime_error("solve_bloch: numerical singularity in harmonic block m=" + std::to_string(m));
    }

    // upward sweep via the conjugation symmetry rho_{-m} = rho_m^dag:
    // T_{-m} = P conj(S_m) P, using (L0 rho)^dag = L0(rho^dag) and
    // (Dplus rho)^dag = Dminus(rho^dag)
    const Eigen::MatrixXcd P = transpose_permutation(parts.op_dim());
    const Eigen::MatrixXcd T1 = P * S[1].conjugate() * P;

    Eigen::MatrixXcd A0 = parts.L0 + parts.Dplus * S[1] + parts.Dminus * T1;
    const Eigen::VectorXcd rho0 = solve_null_unit_trace(A0);
    bloch.comps[static_cast<std::size_t>(m_max)] = unvec(rho0);

    Eigen::VectorXcd up = rho0;
    for (int m = 1; m <= m_max; ++m) {
        up = S[static_cast<std::size_t>(m)] * up;
        bloch.comps[static_cast<std::size_t>(m_max + m)] = unvec(up);
        bloch.comps[static_cast<std::size_t>(m_max - m)] = unvec(up).adjoint();
    }

    // harmonic-balance residual over every retained component
    double num = 0.0, den = 0.0;
    for (int m = -m_max; m <= m_max; ++m) {
        Eigen::VectorXcd r = parts.L0 * vec(bloch.component(m));
        r -= kI * (double(m) * delta) * vec(bloch.component(m));
        if (m + 1 <= m_max) r += parts.Dplus * vec(bloch.component(m + 1));
        if (m - 1 >= -m_max) r += parts.Dminus * vec(bloch.component(m - 1));
        num += r.squaredNorm();
        den += vec(bloch.component(m)).squaredNorm();
    }
    bloch.residual = std::sqrt(num) / (parts.L0.norm() * std::sqrt(den) + 1e-300);
    if (!(bloch.residual < 1e-6))
        throw std::runtime_error("solve_bloch: harmonic balance residual " + std::to_string(bloch.residual));
    return bloch;
}

BlochExpansion solve_bloch(const SystemParams& params, const TransitionMask& mask) {
    const LiouvilleParts parts = build_liouville_parts(params, mask);
    return solve_bloch(parts, params.delta(), params.m_max);
}

Trajectory time_domain_oracle(const LiouvilleParts& parts, double delta, double t_final, int samples,
                              double tol) {
    if (samples < 2) throw std::invalid_argument("time_domain_oracle: need at least 2 samples");
    const int d = parts.op_dim();
    OperatorMatrix rho = OperatorMatrix::Zero(d, d);
    rho(0, 0) = 1.0;  // |0,g><0,g|

    auto rhs = [&](double t, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
        const OperatorMatrix m = unvec(y);
        return vec(parts.mats.apply(m, delta * t)).eval();
    };

    OdeOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol * 1e-2;

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(samples));
    traj.states.reserve(static_cast<std::size_t>(samples));
    Eigen::VectorXcd y = vec(rho);
    double t = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(rho);
    for (int k = 1; k < samples; ++k) {
        const double tk = t_final * double(k) / double(samples - 1);
        y = integrate_ode(rhs, t, tk, std::move(y), opts);
        t = tk;
        traj.times.push_back(tk);
        traj.states.push_back(unvec(y));
    }
    return traj;
}

double cycle_average(const LiouvilleParts& parts, double delta, const OperatorMatrix& O, double t_settle,
                     double tol) {
    const int d = parts.op_dim();
    const int n = d * d;
    OperatorMatrix rho0 = OperatorMatrix::Zero(d, d);
    rho0(0, 0) = 1.0;

    auto rhs = [&](double t, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
        const OperatorMatrix m = unvec(y);
        return vec(parts.mats.apply(m, delta * t)).eval();
    };
    OdeOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol * 1e-2;

    Eigen::VectorXcd y = integrate_ode(rhs, 0.0, t_settle, vec(rho0), opts);
    if (delta == 0.0 || parts.mats.params.drive2 == 0.0)
        return (O * unvec(y)).trace().real();

    // one drive period with an accumulator slot appended
    const double period = 2.0 * M_PI / std::abs(delta);
    Eigen::VectorXcd z(n + 1);
    z.head(n) = y;
    z(n) = 0.0;
    auto rhs_acc = [&](double t, const Eigen::VectorXcd& yy) -> Eigen::VectorXcd {
        Eigen::VectorXcd out(n + 1);
        const OperatorMatrix m = unvec(yy.head(n).eval());
        out.head(n) = vec(parts.mats.apply(m, delta * t));
        out(n) = (O * m).trace();
        return out;
    };
    z = integrate_ode(rhs_acc, t_settle, t_settle + period, std::move(z), opts);
    return z(n).real() / period;
}

ConvergenceReport convergence_check(const SystemParams& params, double rel_tol) {
    params.validate();
    std::map<std::pair<int, int>, double> cache;
    auto value = [&](int n, int m) {
        const auto key = std::make_pair(n, m);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
        SystemParams p = params;
        p.n_max = n;
        p.m_max = m;
        const BlochExpansion bloch = solve_bloch(p);
        const AtomCavityOps ops = make_operators(n);
        const double v = (ops.a_dag * ops.a_dag * ops.a * ops.a * bloch.component(0)).trace().real();
        cache[key] = v;
        return v;
    };

    const int n_start = std::max(3, std::min(params.n_max, 14));
    const int m_start = std::max(1, params.m_max - 1);
    for (int n = n_start; n <= 13; ++n) {
        for (int m = m_start; m <= 6; ++m) {
            const double v = value(n, m);
            const double scale = std::max(std::abs(v), 1e-300);
            if (std::abs(value(n, m + 1) - v) / scale < rel_tol &&
                std::abs(value(n + 1, m) - v) / scale < rel_tol) {
                return {n, m, v};
            }
        }
    }
    throw std::runtime_error("convergence_check: <:n^2:> not converged by n_max = 14");
}

} // namespace pcs
