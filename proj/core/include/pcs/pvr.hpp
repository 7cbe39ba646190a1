// pvr.hpp — closed-form windowed backgrounds from the spectral expansion,
// the peak-to-valley ratio of the pair spectrum, optimal window time search,
// and linear fits of the optimum against the atomic loss rate.
//
// The valley is the far-detuned background: with the scanning field far off
// resonance its time-dependent generator terms drop out, leaving the
// fixed-field monochromatic Liouvillean. The peak sits at
// delta_tilde = 1 + sqrt2.

#pragma once

#include <map>
#include <memory>
#include <vector>

#include "pcs/correlations.hpp"
#include "pcs/ensemble.hpp"

namespace pcs {

// Windowed-background expansion: Delta0(tau) built from (c_n, lambda_n) with
// c0 the asymptotic pair rate (2 kappa)^2 <n>^2.
using BackgroundExpansion = PairCorrelator::Expansion;

enum class WindowKind { conditional, unconditional };

// Expansion of the fixed-field monochromatic background at the given g.
BackgroundExpansion monochromatic_background(const SystemParams& params);

// Windowed background:
//   conditional:    c0 + sum_n c_n (1 - e^{-mu_n}) / mu_n
//   unconditional:  c0 + 2 sum_n c_n ((e^{-mu_n} - 1)/mu_n + 1) / mu_n
// with mu_n = lambda_n tau_w; small-mu terms go through series expansions.
double background_closed_form(const BackgroundExpansion& bg, double tau_w, WindowKind kind);

struct PvrPoint {
    double g = 0.0;  // 0 marks an ensemble-averaged point
    double tau_w = 0.0;
    double pvr_con = 0.0;
    double pvr_unc = 0.0;
};

// Shared precompute for evaluating PVR(tau_w) many times: per coupling node,
// the windowed peak correlators (bichromatic and subtraction) and the
// closed-form background expansion.
class PvrEvaluator {
  public:
    PvrEvaluator(const SystemParams& params, const CouplingDistribution& dist, double tau_max,
                 int n_phases = 8, int workers = 0);

    double numerator(double tau_w, WindowKind kind) const;    // ensemble peak rate
    double denominator(double tau_w, WindowKind kind) const;  // ensemble background
    double pvr(double tau_w, WindowKind kind) const;
    double tau_max() const { return tau_max_; }

  private:
    struct Cell {
        double weight;
        PairCorrelator peak;        // bichromatic at the peak detuning
        PairCorrelator peak_mono;   // scanning-field-only subtraction
        BackgroundExpansion background;
    };
    double tau_max_ = 0.0;
    std::vector<Cell> cells_;
};

// Peak-to-valley ratio at the stated window time (peak at delta_tilde
// = 1 + sqrt2; any delta_tilde on params is ignored).
double peak_to_valley_ratio(const SystemParams& params, double tau_w, const CouplingDistribution& dist,
                            WindowKind kind);

struct WindowOptimum {
    double tau_opt = 0.0;
    double pvr_max = 0.0;
    bool boundary_warning = false;  // no interior maximum inside the bracket
};

struct WindowBracket {
    double tau_lo = 1e-3;
    double tau_hi = 10.0;
    int coarse_points = 25;
    double rel_tol = 1e-3;
};

// Coarse log-grid bracketing followed by golden-section search on log tau.
WindowOptimum optimize_window(const SystemParams& params, const CouplingDistribution& dist,
                              WindowKind kind, const WindowBracket& bracket = {}, int n_phases = 8,
                              int workers = 0);

// Both kinds from one shared evaluator.
std::map<WindowKind, WindowOptimum> optimize_window_both(const SystemParams& params,
                                                         const CouplingDistribution& dist,
                                                         const WindowBracket& bracket = {},
                                                         int n_phases = 8, int workers = 0);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double correlation = 0.0;  // Pearson r
    int n_used = 0;
};

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct GammaSweepPoint {
    double gamma = 0.0;
    WindowOptimum con;
    WindowOptimum unc;
    bool ok = false;
    std::string error;
};

struct GammaSweepResult {
    std::vector<GammaSweepPoint> points;
    LineFit fit_con;  // kappa tau_opt vs gamma/kappa
    LineFit fit_unc;
};

// Optimal window time against the loss rate, with least-squares lines. At
// least 5 gamma values are required; fewer than 3 successful optimizations
// is an error.
GammaSweepResult gamma_sweep_fit(const std::vector<double>& gamma_list, const SystemParams& params,
                                 const CouplingDistribution& dist, const WindowBracket& bracket = {},
                                 int n_phases = 8, int workers = 0);

} // namespace pcs
