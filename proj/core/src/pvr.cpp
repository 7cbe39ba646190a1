#include "pcs/pvr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcs/parallel.hpp"

namespace pcs {

namespace {
constexpr double kPeakDeltaTilde = 2.414213562373095;  // 1 + sqrt2
}

BackgroundExpansion monochromatic_background(const SystemParams& params) {
    const LiouvilleParts parts = build_liouville_parts(params.without_drive2());
    const EigenSystem sys = eigendecompose(parts.L0);
    return pair_regression(sys, parts.mats.ops, params.kappa);
}

double background_closed_form(const BackgroundExpansion& bg, double tau_w, WindowKind kind) {
    if (tau_w <= 0.0) throw std::invalid_argument("background_closed_form: tau_w must be > 0");
    Complex acc = bg.c0;
    for (const auto& [c, lam] : bg.terms) {
        const Complex mu = lam * tau_w;
        acc += (kind == WindowKind::conditional) ? c * phi1(mu) : 2.0 * c * phi2(mu);
    }
    return acc.real();
}

PvrEvaluator::PvrEvaluator(const SystemParams& params, const CouplingDistribution& dist, double tau_max,
                           int n_phases, int workers) {
    if (dist.nodes.empty()) throw std::invalid_argument("PvrEvaluator: empty distribution");
    tau_max_ = tau_max;
    SystemParams peak = params.with_delta_tilde(kPeakDeltaTilde);

    std::vector<std::unique_ptr<Cell>> built(dist.nodes.size());
    std::vector<std::string> errors(dist.nodes.size());
    parallel_for(dist.nodes.size(), workers, [&](std::size_t i) {
        try {
            const SystemParams pg = peak.with_g(dist.nodes[i]);
            auto cell = std::make_unique<Cell>(Cell{
                dist.weights[i],
                PairCorrelator::bichromatic(pg, tau_max, n_phases),
                PairCorrelator::monochromatic(pg),
                monochromatic_background(pg),
            });
            built[i] = std::move(cell);
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    });
    for (std::size_t i = 0; i < built.size(); ++i) {
        if (!built[i]) throw std::runtime_error("PvrEvaluator: cell g=" + std::to_string(dist.nodes[i]) +
                                                " failed: " + errors[i]);
        cells_.push_back(std::move(*built[i]));
    }
}

double PvrEvaluator::numerator(double tau_w, WindowKind kind) const {
    double acc = 0.0;
    for (const auto& cell : cells_) {
        double v;
        if (kind == WindowKind::conditional)
            v = (cell.peak.integral(tau_w) - cell.peak_mono.integral(tau_w)) / tau_w;
        else
            v = 2.0 * (cell.peak.double_integral(tau_w) - cell.peak_mono.double_integral(tau_w)) /
                (tau_w * tau_w);
        acc += cell.weight * v;
    }
    return acc;
}

double PvrEvaluator::denominator(double tau_w, WindowKind kind) const {
    double acc = 0.0;
    for (const auto& cell : cells_)
        acc += cell.weight * background_closed_form(cell.background, tau_w, kind);
    return acc;
}

double PvrEvaluator::pvr(double tau_w, WindowKind kind) const {
    const double den = denominator(tau_w, kind);
    if (std::abs(den) < 1e-14)
        throw std::runtime_error("PvrEvaluator: ill-conditioned ratio, background below 1e-14");
    return numerator(tau_w, kind) / den;
}

double peak_to_valley_ratio(const SystemParams& params, double tau_w, const CouplingDistribution& dist,
                            WindowKind kind) {
    const PvrEvaluator eval(params, dist, tau_w);
    return eval.pvr(tau_w, kind);
}

namespace {

WindowOptimum optimize_on(const PvrEvaluator& eval, WindowKind kind, const WindowBracket& bracket) {
    if (!(bracket.tau_lo > 0.0 && bracket.tau_hi > bracket.tau_lo))
        throw std::invalid_argument("optimize_window: bad bracket");
    const double llo = std::log(bracket.tau_lo);
    const double lhi = std::log(bracket.tau_hi);
    const int np = std::max(bracket.coarse_points, 5);

    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> ls(static_cast<std::size_t>(np));
    for (int i = 0; i < np; ++i) {
        ls[static_cast<std::size_t>(i)] = llo + (lhi - llo) * double(i) / double(np - 1);
        const double v = eval.pvr(std::exp(ls[static_cast<std::size_t>(i)]), kind);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }

    WindowOptimum opt;
    if (best == 0 || best == np - 1) {
        opt.boundary_warning = true;
        opt.tau_opt = std::exp(ls[static_cast<std::size_t>(best)]);
        opt.pvr_max = best_val;
        return opt;
    }

    // golden-section on log tau within the bracketing neighbours
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = ls[static_cast<std::size_t>(best - 1)];
    double b = ls[static_cast<std::size_t>(best + 1)];
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = eval.pvr(std::exp(x1), kind);
    double f2 = eval.pvr(std::exp(x2), kind);
    while (b - a > bracket.rel_tol) {  // log-space interval: relative tol in tau
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = eval.pvr(std::exp(x2), kind);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = eval.pvr(std::exp(x1), kind);
        }
    }
    const double lx = 0.5 * (a + b);
    opt.tau_opt = std::exp(lx);
    opt.pvr_max = eval.pvr(opt.tau_opt, kind);
    return opt;
}

} // namespace

WindowOptimum optimize_window(const SystemParams& params, const CouplingDistribution& dist,
                              WindowKind kind, const WindowBracket& bracket, int n_phases, int workers) {
    const PvrEvaluator eval(params, dist, bracket.tau_hi, n_phases, workers);
    return optimize_on(eval, kind, bracket);
}

std::map<WindowKind, WindowOptimum> optimize_window_both(const SystemParams& params,
                                                         const CouplingDistribution& dist,
                                                         const WindowBracket& bracket, int n_phases,
                                                         int workers) {
    const PvrEvaluator eval(params, dist, bracket.tau_hi, n_phases, workers);
    return {{WindowKind::conditional, optimize_on(eval, WindowKind::conditional, bracket)},
            {WindowKind::unconditional, optimize_on(eval, WindowKind::unconditional, bracket)}};
}

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    const double cxy = sxy - sx * sy / n;
    if (vx <= 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    LineFit fit;
    fit.slope = cxy / vx;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.correlation = (vy > 0.0) ? cxy / std::sqrt(vx * vy) : 0.0;
    fit.n_used = static_cast<int>(x.size());
    return fit;
}

GammaSweepResult gamma_sweep_fit(const std::vector<double>& gamma_list, const SystemParams& params,
                                 const CouplingDistribution& dist, const WindowBracket& bracket,
                                 int n_phases, int workers) {
    if (gamma_list.size() < 5)
        throw std::invalid_argument("gamma_sweep_fit: need at least 5 gamma values");
    GammaSweepResult res;
    for (double gm : gamma_list) {
        GammaSweepPoint pt;
        pt.gamma = gm;
        try {
            const auto optima = optimize_window_both(params.with_gamma(gm), dist, bracket, n_phases, workers);
            pt.con = optima.at(WindowKind::conditional);
            pt.unc = optima.at(WindowKind::unconditional);
            pt.ok = true;
        } catch (const std::exception& ex) {
            pt.error = ex.what();
        }
        res.points.push_back(std::move(pt));
    }

    std::vector<double> gs, tc, tu;
    for (const auto& pt : res.points) {
        if (!pt.ok) continue;
        gs.push_back(pt.gamma);
        tc.push_back(pt.con.tau_opt);
        tu.push_back(pt.unc.tau_opt);
    }
    if (gs.size() < 3)
        throw std::runtime_error("gamma_sweep_fit: insufficient data, fewer than 3 optimizations succeeded");
    res.fit_con = linear_fit(gs, tc);
    res.fit_unc = linear_fit(gs, tu);
    return res;
}

} // namespace pcs
