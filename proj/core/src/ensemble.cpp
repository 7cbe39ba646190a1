#include "pcs/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "pcs/parallel.hpp"

namespace pcs {

double MaskGeometry::corner_coupling() const {
    return g_max * std::cos(M_PI * mask_length_fraction) * std::exp(-waist_ratio * waist_ratio / 4.0);
}

void MaskGeometry::validate() const {
    if (g_max <= 0.0) throw std::invalid_argument("MaskGeometry: g_max must be > 0");
    if (waist_ratio <= 0.0) throw std::invalid_argument("MaskGeometry: waist_ratio must be > 0");
    if (mask_length_fraction <= 0.0 || mask_length_fraction >= 0.5)
        throw std::invalid_argument("MaskGeometry: mask_length_fraction must lie in (0, 0.5)");
    if (cutoff <= 0.0 || cutoff >= 1.0) throw std::invalid_argument("MaskGeometry: cutoff F must lie in (0, 1)");
}

CouplingDistribution build_distribution(const MaskGeometry& geom, int n_nodes, int samples_per_axis) {
    geom.validate();
    if (n_nodes < 8) throw std::invalid_argument("build_distribution: need at least 8 nodes");
    if (samples_per_axis < 16) throw std::invalid_argument("build_distribution: too few samples");

    const double lo = geom.cutoff * geom.g_max;
    const double hi = geom.g_max;
    const int nb = n_nodes;
    const double width = (hi - lo) / nb;
    std::vector<double> mass(static_cast<std::size_t>(nb), 0.0);
    std::vector<double> gsum(static_cast<std::size_t>(nb), 0.0);

    // transit coordinate in units of w0; dwell length above a threshold G is
    // 2 z(G) with z(G) = sqrt(log(A / G)), and the path-averaged coupling
    // follows from the Gaussian integral
    const double sqrt_pi_2 = std::sqrt(M_PI) / 2.0;
    auto z_of = [](double A, double G) { return std::sqrt(std::log(A / G)); };

    // midpoint tensor grid over the mask cross-section; x in units of
    // lambda, y of w0
    const int N = samples_per_axis;
    const double half_len = geom.mask_length_fraction / 2.0;
    const double half_h = geom.waist_ratio / 2.0;
    for (int ix = 0; ix < N; ++ix) {
        const double x = half_len * (2.0 * (ix + 0.5) / N - 1.0);
        const double cx = std::cos(2.0 * M_PI * x);
        for (int iy = 0; iy < N; ++iy) {
            const double y = half_h * (2.0 * (iy + 0.5) / N - 1.0);
            const double A = geom.g_max * cx * std::exp(-y * y);  // coupling at z = 0
            if (A <= lo) continue;
            for (int b = 0; b < nb; ++b) {
                const double g1 = lo + b * width;
                if (g1 >= A) break;
                const double g2 = std::min(lo + (b + 1) * width, A);
                const double z1 = z_of(A, g1);
                const double z2 = (g2 >= A) ? 0.0 : z_of(A, g2);
                mass[static_cast<std::size_t>(b)] += z1 - z2;
                gsum[static_cast<std::size_t>(b)] += A * sqrt_pi_2 * (std::erf(z1) - std::erf(z2));
            }
        }
    }

    double total = 0.0;
    for (double m : mass) total += m;
    if (total <= 0.0)
        throw std::runtime_error("build_distribution: empty support, cutoff above the attainable couplings");

    CouplingDistribution dist;
    for (int b = 0; b < nb; ++b) {
        if (mass[static_cast<std::size_t>(b)] == 0.0) continue;
        dist.nodes.push_back(gsum[static_cast<std::size_t>(b)] / mass[static_cast<std::size_t>(b)]);
        dist.weights.push_back(mass[static_cast<std::size_t>(b)] / total);
    }
    return dist;
}

CouplingDistribution point_distribution(double g) {
    if (g <= 0.0) throw std::invalid_argument("point_distribution: g must be > 0");
    return {{g}, {1.0}};
}

double ensemble_average(const std::function<double(double)>& observable_of_g,
                        const CouplingDistribution& dist) {
    if (dist.nodes.empty()) throw std::invalid_argument("ensemble_average: empty distribution");
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.nodes.size(); ++i)
        acc += dist.weights[i] * observable_of_g(dist.nodes[i]);
    return acc;
}

void write_csv(const CouplingDistribution& dist, std::ostream& out) {
    out << "g,weight\n";
    char buf[64];
    for (std::size_t i = 0; i < dist.nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e\n", dist.nodes[i], dist.weights[i]);
        out << buf;
    }
}

ResonanceLines resonance_lines(double g, double g_f) {
    if (g <= 0.0 || g_f <= 0.0) throw std::invalid_argument("resonance_lines: couplings must be > 0");
    const double r = g / g_f;
    const double s3 = std::sqrt(3.0);
    ResonanceLines lines;
    lines.three_photon = {2.0 - s3 * r,         2.0 + s3 * r,
                          (1.0 - s3 * r) / 2.0, (1.0 + s3 * r) / 2.0,
                          -r / s3,              r / s3};
    std::sort(lines.three_photon.begin(), lines.three_photon.end());
    lines.drive1_only_g = s3 * g_f;
    lines.drive1_only_resonant = std::abs(s3 * g - 3.0 * g_f) < 1e-9 * g_f;
    return lines;
}

std::array<double, 2> two_photon_lines(double g, double g_f) {
    const double r = g / g_f;
    return {1.0 - std::sqrt(2.0) * r, 1.0 + std::sqrt(2.0) * r};
}

std::vector<double> figure_guide_lines(double g, double g_f) {
    const ResonanceLines rl = resonance_lines(g, g_f);
    std::vector<double> all(rl.three_photon.begin(), rl.three_photon.end());
    for (double v : two_photon_lines(g, g_f)) all.push_back(v);
    std::sort(all.begin(), all.end());
    return all;
}

std::string rate_kind_name(RateKind kind) {
    switch (kind) {
        case RateKind::w2: return "w2";
        case RateKind::diff2: return "diff2";
        case RateKind::three_a3: return "a3_moment";
        case RateKind::three_sa2: return "sa2_moment";
        case RateKind::diff23: return "diff23";
    }
    return "?";
}

namespace {

struct CellMoments {
    double m20 = 0.0, m30 = 0.0, m21 = 0.0;  // bichromatic rho_0
    double b20 = 0.0, b30 = 0.0, b21 = 0.0;  // monochromatic subtraction
    bool ok = false;
    std::string error;
};

CellMoments solve_cell(const SystemParams& params, bool need_mono, const TransitionMask& mask) {
    CellMoments cm;
    try {
        const auto [rho0, ops] = long_time_rho0(params, mask);
        cm.m20 = normal_ordered_moment(rho0, 2, 0, ops);
        cm.m30 = normal_ordered_moment(rho0, 3, 0, ops);
        cm.m21 = normal_ordered_moment(rho0, 2, 1, ops);
        if (need_mono && params.drive1 > 0.0) {
            const auto [rho_b, ops_b] = long_time_rho0(params.without_drive1(), mask);
            cm.b20 = normal_ordered_moment(rho_b, 2, 0, ops_b);
            cm.b30 = normal_ordered_moment(rho_b, 3, 0, ops_b);
            cm.b21 = normal_ordered_moment(rho_b, 2, 1, ops_b);
        }
        cm.ok = true;
    } catch (const std::exception& ex) {
        cm.error = ex.what();
    }
    return cm;
}

} // namespace

SpectrumTable spectrum_sweep(const SystemParams& params, const std::vector<double>& delta_grid,
                             const CouplingDistribution& dist, const std::vector<RateKind>& kinds,
                             const TransitionMask& mask, int workers) {
    params.validate();
    SpectrumTable table;
    if (kinds.empty() || delta_grid.empty()) return table;
    if (dist.nodes.empty()) throw std::invalid_argument("spectrum_sweep: empty distribution");

    const bool need_mono =
        std::any_of(kinds.begin(), kinds.end(),
                    [](RateKind k) { return k == RateKind::diff2 || k == RateKind::diff23; });

    const std::size_t nd = delta_grid.size();
    const std::size_t ng = dist.nodes.size();
    std::vector<CellMoments> cells(nd * ng);

    parallel_for(nd * ng, workers, [&](std::size_t idx) {
        const std::size_t id = idx / ng;
        const std::size_t ig = idx % ng;
        const SystemParams p = params.with_delta_tilde(delta_grid[id]).with_g(dist.nodes[ig]);
        cells[idx] = solve_cell(p, need_mono, mask);
    });

    const double k2 = std::pow(2.0 * params.kappa, 2);
    const double k3 = std::pow(2.0 * params.kappa, 3);

    table.rows.reserve(nd);
    for (std::size_t id = 0; id < nd; ++id) {
        SpectrumRow row;
        row.delta_tilde = delta_grid[id];
        bool row_ok = true;
        CellMoments avg;
        for (std::size_t ig = 0; ig < ng; ++ig) {
            const CellMoments& cm = cells[id * ng + ig];
            if (!cm.ok) {
                row_ok = false;
                table.cell_errors.push_back("delta_tilde=" + std::to_string(delta_grid[id]) +
                                            " g=" + std::to_string(dist.nodes[ig]) + ": " + cm.error);
                continue;
            }
            const double w = dist.weights[ig];
            avg.m20 += w * cm.m20; avg.m30 += w * cm.m30; avg.m21 += w * cm.m21;
            avg.b20 += w * cm.b20; avg.b30 += w * cm.b30; avg.b21 += w * cm.b21;
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (RateKind kind : kinds) {
            double v = nan;
            if (row_ok) {
                switch (kind) {
                    case RateKind::w2: v = k2 * avg.m20; break;
                    case RateKind::diff2: v = k2 * (avg.m20 - avg.b20); break;
                    case RateKind::three_a3: v = avg.m30; break;
                    case RateKind::three_sa2: v = avg.m21; break;
                    case RateKind::diff23:
                        v = k2 * (avg.m20 - avg.b20) + k3 * (avg.m30 - avg.b30) +
                            k2 * params.gamma * (avg.m21 - avg.b21);
                        break;
                }
            }
            row.values[kind] = v;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace pcs
