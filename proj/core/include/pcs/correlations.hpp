// correlations.hpp — normally ordered photon rates: the pair rate, the
// multi-photon ladder, background-subtracted differences, the stationary
// two-time pair correlator via quantum regression, and windowed
// conditional/unconditional coincidence rates.

#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pcs/floquet.hpp"
#include "pcs/liouville.hpp"
#include "pcs/quadrature.hpp"

namespace pcs {

// ------------------------------- window kernels -------------------------------

// (1 - e^{-mu}) / mu, Taylor expanded for small |mu| to avoid cancellation.
Complex phi1(Complex mu);
// ((e^{-mu} - 1)/mu + 1) / mu, the double-integral kernel.
Complex phi2(Complex mu);

// ------------------------------- moments -------------------------------

// <sigma+^m a^dag^k a^k sigma-^m> on rho. Real and nonnegative up to
// roundoff; identically zero for m >= 2 (two-level algebra), in which case
// *degenerate is set.
double normal_ordered_moment(const OperatorMatrix& rho, int k, int m, const AtomCavityOps& ops,
                             bool* degenerate = nullptr);

// ----------------------------- alpha coefficients -----------------------------

// Exit-channel word for an ell-photon coincidence: entries k_i in {0,1}
// select the cavity (0) or atomic side (1) channel; length ell - 2.
struct KVector {
    std::vector<int> entries;
    int K() const;
    int ell() const { return static_cast<int>(entries.size()) + 2; }
};

// alpha_k = (2 kappa)^{ell-K} gamma^K.
double alpha_coefficient(const KVector& kvec, const SystemParams& params);

// --------------------------------- rates ---------------------------------

struct RateResult {
    double value = 0.0;
    std::map<std::string, double> components;  // raw moments per atomic order m
    bool truncation_warning = false;           // ell beyond the Fock truncation
};

// rho_0 of the long-time solution plus its operator set; routes to the
// cheapest solver for the drive configuration.
std::pair<OperatorMatrix, AtomCavityOps> long_time_rho0(const SystemParams& params,
                                                        const TransitionMask& mask = {});

// w^(2) = (2 kappa)^2 <: n^2 :> on the long-time rho_0.
RateResult w_pair(const SystemParams& params);

// w^(ell) = sum_m (2 kappa)^{ell-m} gamma^m <sigma+^m a^dag^{ell-m} a^{ell-m} sigma-^m>.
RateResult w_multi(int ell, const SystemParams& params);

// Background-subtracted rate w^(ell)(E1) - w^(ell)(E1 = 0); the subtrahend
// solves the scanning-frame monochromatic problem.
RateResult difference_rate(int ell, const SystemParams& params);

// --------------------------- two-time correlator ---------------------------

// Stationary pair correlator w2(t) = (2 kappa)^2 <: n(t0) n(t0+t) :> in the
// long-time limit. Monochromatic problems use the spectral expansion; the
// bichromatic case propagates the conditioned state a rho a^dag and averages
// the conditioning time over the drive cycle.
class PairCorrelator {
  public:
    // Full bichromatic problem; usable for t in [0, tau_max].
    static PairCorrelator bichromatic(const SystemParams& params, double tau_max, int n_phases = 8,
                                      double tol = 1e-10, const TransitionMask& mask = {});
    // Monochromatic problem: the scanning field alone (E1 = 0, scanning
    // frame) when drive2 > 0, otherwise the fixed field alone.
    static PairCorrelator monochromatic(const SystemParams& params, const TransitionMask& mask = {});

    double operator()(double t) const;        // w2(t)
    double integral(double tau) const;        // int_0^tau w2
    double double_integral(double tau) const; // int_0^tau int_0^u w2
    double short_limit() const;               // (2 kappa)^2 <: n^2 :>
    double long_limit() const;                // (2 kappa)^2 <n>^2
    double tau_max() const { return tau_max_; }
    bool analytic() const { return analytic_; }

    // spectral-expansion data (analytic backend only)
    struct Expansion {
        double c0 = 0.0;
        std::vector<std::pair<Complex, Complex>> terms;  // (c_n, lambda_n)
    };
    const Expansion& expansion() const;

  private:
    PairCorrelator() = default;

    struct Series {
        std::vector<double> t, val, der;
        double eval(double x) const;
    };
    struct PhaseData {
        Series w2, g1, g2;  // correlator, running integral, running double integral
    };

    bool analytic_ = false;
    double tau_max_ = 0.0;
    Expansion exp_;
    std::vector<PhaseData> phases_;
};

// Spectral regression expansion of the monochromatic pair correlator:
// w2(t) = c0 + sum_n c_n e^{-lambda_n t}, c0 the asymptotic pair rate
// (2 kappa)^2 <n>^2. Near-degenerate eigenvalues are grouped.
PairCorrelator::Expansion pair_regression(const EigenSystem& sys, const AtomCavityOps& ops, double kappa);

// Single-point evaluation per the drive configuration; bichromatic problems
// average over n_phases conditioning phases.
double two_time_pair_correlation(const SystemParams& params, double t, int n_phases = 8);

// ------------------------------ windowed rates ------------------------------

// Conditional difference rate (1/tau) int_0^tau [w2(t) - w2_0(t)] dt by
// adaptive quadrature over the correlator difference.
double conditional_rate(const SystemParams& params, double tau_w, int n_phases = 8);

// Unconditional difference rate via the nested form
// (2/tau^2) int_0^tau du int_0^u dv [w2(v) - w2_0(v)].
double unconditional_rate(const SystemParams& params, double tau_w, int n_phases = 8);

// Literal double-integral form (2/tau^2) int_0^tau dt' int_0^t' dt w2(t'-t);
// retained as an oracle for the nested form.
double unconditional_rate_raw(const SystemParams& params, double tau_w, int n_phases = 8);

// Window-geometry forms for an arbitrary correlator.
double windowed_rate_nested(const std::function<double(double)>& w2, double tau_w,
                            const QuadratureOptions& opts = {});
double windowed_rate_raw(const std::function<double(double)>& w2, double tau_w,
                         const QuadratureOptions& opts = {});

} // namespace pcs
