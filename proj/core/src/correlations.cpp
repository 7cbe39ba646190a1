#include "pcs/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcs {

Complex phi1(Complex mu) {
    if (std::abs(mu) < 1e-4)
        return 1.0 - mu / 2.0 + mu * mu / 6.0 - mu * mu * mu / 24.0;
    return (1.0 - std::exp(-mu)) / mu;
}

Complex phi2(Complex mu) {
    if (std::abs(mu) < 1e-4)
        return 0.5 - mu / 6.0 + mu * mu / 24.0 - mu * mu * mu / 120.0;
    return ((std::exp(-mu) - 1.0) / mu + 1.0) / mu;
}

double normal_ordered_moment(const OperatorMatrix& rho, int k, int m, const AtomCavityOps& ops,
                             bool* degenerate) {
    if (k < 0 || m < 0) throw std::invalid_argument("normal_ordered_moment: negative operator power");
    if (degenerate) *degenerate = false;
    if (m >= 2) {
        // sigma-^2 = 0: the term vanishes identically
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    OperatorMatrix X = OperatorMatrix::Identity(ops.dim, ops.dim);
    for (int i = 0; i < k; ++i) X = ops.a * X;
    if (m == 1) X = X * ops.sm;
    return (X * rho * X.adjoint()).trace().real();
}

int KVector::K() const {
    int sum = 0;
    for (int e : entries) {
        if (e != 0 && e != 1) throw std::invalid_argument("KVector: entries must be 0 or 1");
        sum += e;
    }
    return sum;
}

double alpha_coefficient(const KVector& kvec, const SystemParams& params) {
    const int K = kvec.K();
    const int ell = kvec.ell();
    return std::pow(2.0 * params.kappa, ell - K) * std::pow(params.gamma, K);
}

std::pair<OperatorMatrix, AtomCavityOps> long_time_rho0(const SystemParams& params,
                                                        const TransitionMask& mask) {
    if (params.drive2 == 0.0) {
        const LiouvilleParts parts = build_liouville_parts(params, mask);
        return {steady_state(parts.L0), parts.mats.ops};
    }
    if (params.drive1 == 0.0) {
        // monochromatic scanning field: time independent in its own frame,
        // and photon-number moments are frame invariant
        const LiouvilleParts parts = build_monochromatic_parts(params, mask);
        return {steady_state(parts.L0), parts.mats.ops};
    }
    const LiouvilleParts parts = build_liouville_parts(params, mask);
    const BlochExpansion bloch = solve_bloch(parts, params.delta(), params.m_max);
    return {bloch.component(0), parts.mats.ops};
}

RateResult w_pair(const SystemParams& params) {
    const auto [rho0, ops] = long_time_rho0(params);
    RateResult res;
    const double m20 = normal_ordered_moment(rho0, 2, 0, ops);
    res.components["moment_m0"] = m20;
    res.value = std::pow(2.0 * params.kappa, 2) * m20;
    return res;
}

RateResult w_multi(int ell, const SystemParams& params) {
    if (ell < 2) throw std::invalid_argument("w_multi: ell must be >= 2");
    const auto [rho0, ops] = long_time_rho0(params);
    RateResult res;
    res.truncation_warning = ell > params.n_max;
    // terms with m >= 2 vanish identically for a two-level atom
    for (int m = 0; m <= std::min(ell - 2, 1); ++m) {
        const double mom = normal_ordered_moment(rho0, ell - m, m, ops);
        res.components["moment_m" + std::to_string(m)] = mom;
        res.value += std::pow(2.0 * params.kappa, ell - m) * std::pow(params.gamma, m) * mom;
    }
    return res;
}

RateResult difference_rate(int ell, const SystemParams& params) {
    const RateResult with = w_multi(ell, params);
    const RateResult without = w_multi(ell, params.without_drive1());
    RateResult res;
    res.value = with.value - without.value;
    res.truncation_warning = with.truncation_warning;
    for (const auto& [key, val] : with.components)
        res.components[key] = val - without.components.at(key);
    return res;
}

// --------------------------- two-time correlator ---------------------------

PairCorrelator::Expansion pair_regression(const EigenSystem& sys, const AtomCavityOps& ops, double kappa) {
    if (sys.schur_fallback)
        throw std::runtime_error("pair_regression: eigenbasis unusable (near-defective generator)");
    const OperatorMatrix rho_ss = sys.steady();
    const OperatorMatrix v0 = ops.a * rho_ss * ops.a_dag;
    const Eigen::VectorXcd beta = sys.expand(v0);
    const double pref = std::pow(2.0 * kappa, 2);

    std::vector<std::pair<Complex, Complex>> raw;
    Complex c_steady = 0.0;
    for (int n = 0; n < sys.dim(); ++n) {
        const Complex cn = pref * beta(n) * (ops.n * sys.modes[static_cast<std::size_t>(n)]).trace();
        if (n == 0) {
            c_steady = cn;
            continue;
        }
        raw.emplace_back(cn, sys.lambdas(n));
    }

    // group near-degenerate eigenvalues so the window kernels act blockwise
    std::sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) {
        if (x.second.real() != y.second.real()) return x.second.real() < y.second.real();
        return x.second.imag() < y.second.imag();
    });
    PairCorrelator::Expansion exp;
    exp.c0 = c_steady.real();
    for (const auto& [c, lam] : raw) {
        if (!exp.terms.empty() && std::abs(exp.terms.back().second - lam) < 1e-9)
            exp.terms.back().first += c;
        else
            exp.terms.emplace_back(c, lam);
    }
    return exp;
}

double PairCorrelator::Series::eval(double x) const {
    if (t.empty()) throw std::runtime_error("PairCorrelator: empty series");
    if (x < t.front() - 1e-12 || x > t.back() + 1e-9)
        throw std::out_of_range("PairCorrelator: query beyond tau_max");
    if (x <= t.front()) return val.front();
    if (x >= t.back()) return val.back();
    std::size_t lo = 0, hi = t.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (t[mid] <= x) lo = mid; else hi = mid;
    }
    const double h = t[hi] - t[lo];
    const double s = (x - t[lo]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * val[lo] + h10 * h * der[lo] + h01 * val[hi] + h11 * h * der[hi];
}

PairCorrelator PairCorrelator::monochromatic(const SystemParams& params, const TransitionMask& mask) {
    const LiouvilleParts parts = (params.drive2 > 0.0) ? build_monochromatic_parts(params, mask)
                                                       : build_liouville_parts(params, mask);
    const EigenSystem sys = eigendecompose(parts.L0);
    PairCorrelator pc;
    pc.analytic_ = true;
    pc.tau_max_ = std::numeric_limits<double>::infinity();
    pc.exp_ = pair_regression(sys, parts.mats.ops, params.kappa);
    return pc;
}

PairCorrelator PairCorrelator::bichromatic(const SystemParams& params, double tau_max, int n_phases,
                                           double tol, const TransitionMask& mask) {
    if (tau_max <= 0.0) throw std::invalid_argument("PairCorrelator: tau_max must be > 0");
    if (n_phases < 1) throw std::invalid_argument("PairCorrelator: need at least one phase");
    const LiouvilleParts parts = build_liouville_parts(params, mask);
    const double delta = params.delta();
    const BlochExpansion bloch = solve_bloch(parts, delta, params.m_max);

    const AtomCavityOps& ops = parts.mats.ops;
    const int nv = ops.dim * ops.dim;
    const double pref = std::pow(2.0 * params.kappa, 2);

    PairCorrelator pc;
    pc.analytic_ = false;
    pc.tau_max_ = tau_max;
    const double mean_n = (ops.n * bloch.component(0)).trace().real();
    pc.exp_.c0 = pref * mean_n * mean_n;  // long-window asymptote

    const bool static_drive = (params.drive2 == 0.0);
    const int phases = static_drive ? 1 : n_phases;
    OdeOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol * 1e-2;

    for (int j = 0; j < phases; ++j) {
        const double phase = 2.0 * M_PI * double(j) / double(phases);
        const OperatorMatrix rho_bar = bloch.at_phase(phase);
        const OperatorMatrix v0 = ops.a * rho_bar * ops.a_dag;

        auto rhs = [&](double t, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
            Eigen::VectorXcd f(nv + 2);
            const OperatorMatrix v = unvec(y.head(nv).eval());
            f.head(nv) = vec(parts.mats.apply(v, phase + delta * t));
            f(nv) = pref * (ops.n * v).trace();
            f(nv + 1) = y(nv);
            return f;
        };

        Eigen::VectorXcd y0(nv + 2);
        y0.head(nv) = vec(v0);
        y0(nv) = 0.0;
        y0(nv + 1) = 0.0;

        std::vector<OdeNode> nodes;
        integrate_ode(rhs, 0.0, tau_max, std::move(y0), opts, &nodes);

        PhaseData pd;
        const std::size_t count = nodes.size();
        pd.w2.t.resize(count); pd.w2.val.resize(count); pd.w2.der.resize(count);
        pd.g1.t.resize(count); pd.g1.val.resize(count); pd.g1.der.resize(count);
        pd.g2.t.resize(count); pd.g2.val.resize(count); pd.g2.der.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            const auto& nd = nodes[k];
            const OperatorMatrix v = unvec(nd.y.head(nv).eval());
            const OperatorMatrix dv = unvec(nd.f.head(nv).eval());
            const double w2 = pref * (ops.n * v).trace().real();
            pd.w2.t[k] = nd.t;
            pd.w2.val[k] = w2;
            pd.w2.der[k] = pref * (ops.n * dv).trace().real();
            pd.g1.t[k] = nd.t;
            pd.g1.val[k] = nd.y(nv).real();
            pd.g1.der[k] = w2;
            pd.g2.t[k] = nd.t;
            pd.g2.val[k] = nd.y(nv + 1).real();
            pd.g2.der[k] = nd.y(nv).real();
        }
        pc.phases_.push_back(std::move(pd));
    }
    return pc;
}

const PairCorrelator::Expansion& PairCorrelator::expansion() const {
    if (!analytic_) throw std::logic_error("PairCorrelator: no spectral expansion on the propagated path");
    return exp_;
}

double PairCorrelator::operator()(double t) const {
    if (t < 0.0) throw std::invalid_argument("PairCorrelator: negative time lag");
    if (analytic_) {
        Complex acc = exp_.c0;
        for (const auto& [c, lam] : exp_.terms) acc += c * std::exp(-lam * t);
        return acc.real();
    }
    double sum = 0.0;
    for (const auto& pd : phases_) sum += pd.w2.eval(t);
    return sum / double(phases_.size());
}

double PairCorrelator::integral(double tau) const {
    if (tau < 0.0) throw std::invalid_argument("PairCorrelator: negative window");
    if (analytic_) {
        Complex acc = exp_.c0 * tau;
        for (const auto& [c, lam] : exp_.terms) acc += c * tau * phi1(lam * tau);
        return acc.real();
    }
    double sum = 0.0;
    for (const auto& pd : phases_) sum += pd.g1.eval(tau);
    return sum / double(phases_.size());
}

double PairCorrelator::double_integral(double tau) const {
    if (tau < 0.0) throw std::invalid_argument("PairCorrelator: negative window");
    if (analytic_) {
        Complex acc = exp_.c0 * tau * tau / 2.0;
        for (const auto& [c, lam] : exp_.terms) acc += c * tau * tau * phi2(lam * tau);
        return acc.real();
    }
    double sum = 0.0;
    for (const auto& pd : phases_) sum += pd.g2.eval(tau);
    return sum / double(phases_.size());
}

double PairCorrelator::short_limit() const {
    if (analytic_) {
        Complex acc = exp_.c0;
        for (const auto& [c, lam] : exp_.terms) acc += c;
        return acc.real();
    }
    return (*this)(0.0);
}

double PairCorrelator::long_limit() const { return exp_.c0; }

double two_time_pair_correlation(const SystemParams& params, double t, int n_phases) {
    if (t < 0.0) throw std::invalid_argument("two_time_pair_correlation: t must be >= 0");
    if (params.drive1 > 0.0 && params.drive2 > 0.0) {
        const PairCorrelator pc = PairCorrelator::bichromatic(params, std::max(t, 1e-9), n_phases);
        return pc(t);
    }
    return PairCorrelator::monochromatic(params)(t);
}

// ------------------------------ windowed rates ------------------------------

namespace {

struct DifferencePair {
    PairCorrelator bichrom;
    PairCorrelator mono;
    double operator()(double t) const { return bichrom(t) - mono(t); }
};

DifferencePair make_difference(const SystemParams& params, double tau_max, int n_phases) {
    return {PairCorrelator::bichromatic(params, tau_max, n_phases),
            PairCorrelator::monochromatic(params)};
}

} // namespace

double conditional_rate(const SystemParams& params, double tau_w, int n_phases) {
    if (tau_w <= 0.0) throw std::invalid_argument("conditional_rate: tau_w must be > 0");
    if (params.drive1 == 0.0) return 0.0;  // identical subtraction
    const DifferencePair diff = make_difference(params, tau_w, n_phases);
    const double integral = integrate([&](double t) { return diff(t); }, 0.0, tau_w);
    return integral / tau_w;
}

double unconditional_rate(const SystemParams& params, double tau_w, int n_phases) {
    if (tau_w <= 0.0) throw std::invalid_argument("unconditional_rate: tau_w must be > 0");
    if (params.drive1 == 0.0) return 0.0;
    const DifferencePair diff = make_difference(params, tau_w, n_phases);
    // nested form: the inner integral comes from the correlator cumulative
    auto inner = [&](double u) { return diff.bichrom.integral(u) - diff.mono.integral(u); };
    const double outer = integrate(inner, 0.0, tau_w);
    return 2.0 * outer / (tau_w * tau_w);
}

double unconditional_rate_raw(const SystemParams& params, double tau_w, int n_phases) {
    if (tau_w <= 0.0) throw std::invalid_argument("unconditional_rate_raw: tau_w must be > 0");
    if (params.drive1 == 0.0) return 0.0;
    const DifferencePair diff = make_difference(params, tau_w, n_phases);
    return windowed_rate_raw([&](double t) { return diff(t); }, tau_w);
}

double windowed_rate_nested(const std::function<double(double)>& w2, double tau_w,
                            const QuadratureOptions& opts) {
    if (tau_w <= 0.0) throw std::invalid_argument("windowed_rate_nested: tau_w must be > 0");
    QuadratureOptions inner_opts = opts;
    inner_opts.abs_tol *= 0.1;
    inner_opts.rel_tol *= 0.1;
    auto inner = [&](double u) { return integrate(w2, 0.0, u, inner_opts); };
    return 2.0 * integrate(inner, 0.0, tau_w, opts) / (tau_w * tau_w);
}

double windowed_rate_raw(const std::function<double(double)>& w2, double tau_w,
                         const QuadratureOptions& opts) {
    if (tau_w <= 0.0) throw std::invalid_argument("windowed_rate_raw: tau_w must be > 0");
    QuadratureOptions inner_opts = opts;
    inner_opts.abs_tol *= 0.1;
    inner_opts.rel_tol *= 0.1;
    auto inner = [&](double tp) {
        if (tp <= 0.0) return 0.0;
        return integrate([&](double t) { return w2(tp - t); }, 0.0, tp, inner_opts);
    };
    return 2.0 * integrate(inner, 0.0, tau_w, opts) / (tau_w * tau_w);
}

} // namespace pcs
