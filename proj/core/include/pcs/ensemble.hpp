// ensemble.hpp — coupling-strength distribution from the mask geometry,
// ensemble averaging, spectrum sweeps over the normalized detuning, and the
// three-photon resonance-line predictions.

#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pcs/correlations.hpp"

namespace pcs {

// Rectangular mask centred at an antinode of a TEM00 standing wave, crossed
// by atoms travelling transverse to the cavity axis. The mask fixes the beam
// cross-section: length mask_length_fraction * lambda along the cavity axis
// (x) and height waist_ratio * w0 across one transverse direction (y). The
// travel direction z sweeps the Gaussian mode profile, so detection events
// sample it uniformly in time. Couplings map through
//   g(x, y, z) = g_max cos(2 pi x / lambda) exp(-(y^2 + z^2) / w0^2),
// restricted to F g_max < g <= g_max. The transit sampling concentrates
// weight at the low-g end of the support.
struct MaskGeometry {
    double waist_ratio = 1.0;
    double mask_length_fraction = 0.1;
    double cutoff = 0.3;  // F in (0,1)
    double g_max = 10.0;

    // coupling at the mask corner in the central plane z = 0
    double corner_coupling() const;
    void validate() const;
};

struct CouplingDistribution {
    std::vector<double> nodes;    // strictly increasing, in (F g_max, g_max]
    std::vector<double> weights;  // sum to 1

    std::size_t size() const { return nodes.size(); }
};

// Push the uniform position distribution through g(x, y, z) on a
// deterministic midpoint tensor grid over the mask cross-section, with the
// transit coordinate handled in closed form, truncate below F g_max, and bin
// into at most n_nodes mass-preserving quadrature nodes.
CouplingDistribution build_distribution(const MaskGeometry& geom, int n_nodes,
                                        int samples_per_axis = 1000);

CouplingDistribution point_distribution(double g);

double ensemble_average(const std::function<double(double)>& observable_of_g,
                        const CouplingDistribution& dist);

// two-column CSV (g/kappa, weight)
void write_csv(const CouplingDistribution& dist, std::ostream& out);

// ------------------------------- resonance lines -------------------------------

// Normalized detunings of the three-photon resonance conditions:
//   3w ± sqrt3 g = 2 w1 + w2  ->  2 ± sqrt3 g/g_f
//   3w ± sqrt3 g = w1 + 2 w2  ->  (g_f ± sqrt3 g) / (2 g_f)
//   3w ± sqrt3 g = 3 w2       ->  ± g / (sqrt3 g_f)
// plus the fixed-field-only condition 3w - sqrt3 g = 3 w1 (g = sqrt3 g_f),
// which involves no scanning photon.
struct ResonanceLines {
    std::array<double, 6> three_photon;  // ascending
    bool drive1_only_resonant = false;   // Eq. of the 3 w1 pathway satisfied
    double drive1_only_g = 0.0;          // coupling that would satisfy it
};
ResonanceLines resonance_lines(double g, double g_f);

// Two-photon lines 1 ± sqrt2 g/g_f (the pair-excitation conditions).
std::array<double, 2> two_photon_lines(double g, double g_f);

// Sorted union of the two- and three-photon lines, the guide-line set for
// the three-photon spectra.
std::vector<double> figure_guide_lines(double g, double g_f);

// --------------------------------- sweeps ---------------------------------

enum class RateKind { w2, diff2, three_a3, three_sa2, diff23 };

std::string rate_kind_name(RateKind kind);

struct SpectrumRow {
    double delta_tilde = 0.0;
    std::map<RateKind, double> values;  // NaN where a cell solve failed
};

struct SpectrumTable {
    std::vector<SpectrumRow> rows;
    std::vector<std::string> cell_errors;  // one entry per failed (delta, g) cell

    bool complete() const { return cell_errors.empty(); }
};

// Ensemble-averaged rates on the detuning grid. Every (delta, g) cell is an
// independent solve; failures are recorded and the sweep continues.
SpectrumTable spectrum_sweep(const SystemParams& params, const std::vector<double>& delta_grid,
                             const CouplingDistribution& dist, const std::vector<RateKind>& kinds,
                             const TransitionMask& mask = {}, int workers = 0);

} // namespace pcs
