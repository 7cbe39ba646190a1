// params.hpp — physical rates, detunings and truncation orders for the
// driven atom-cavity system. All rates are dimensionless, in units of the
// cavity field decay rate kappa; photon pairs leave the cavity at (2 kappa)^2.

#pragma once

#include <stdexcept>
#include <string>

namespace pcs {

struct SystemParams {
    double g_f = 9.0;          // coupling of the resonant subensemble
    double g = 9.0;            // actual coupling strength
    double kappa = 1.0;        // cavity field decay rate
    double gamma = 2.0;        // inhibited spontaneous emission rate
    double drive1 = 0.5;       // fixed-field amplitude E1
    double drive2 = 0.5;       // scanning-field amplitude E2
    double delta_tilde = 0.0;  // normalized scanning detuning (w2-w)/(w-w1)
    int n_max = 6;             // Fock truncation
    int m_max = 3;             // Bloch harmonic truncation M

    // Product-space dimension 2 (n_max + 1).
    int dim() const { return 2 * (n_max + 1); }

    // w - w1 = g_f: the fixed field resonantly excites |0> <-> |1>_- of the
    // g = g_f subensemble. Absolute frequencies appear only via differences.
    double detuning1() const { return g_f; }

    // delta = w2 - w1 = g_f (1 + delta_tilde), the beat of the two fields.
    double delta() const { return g_f * (1.0 + delta_tilde); }

    // w - w2 = -g_f delta_tilde, the detuning seen in the scanning-field frame.
    double detuning2() const { return -g_f * delta_tilde; }

    // Structural checks needed by any operator construction.
    void validate_structure() const {
        if (n_max < 2) throw std::invalid_argument("SystemParams: invalid truncation, n_max must be >= 2");
        if (m_max < 1) throw std::invalid_argument("SystemParams: invalid truncation, m_max must be >= 1");
        if (g_f <= 0.0) throw std::invalid_argument("SystemParams: g_f must be > 0");
        if (g <= 0.0) throw std::invalid_argument("SystemParams: g must be > 0");
        if (kappa < 0.0 || gamma < 0.0) throw std::invalid_argument("SystemParams: decay rates must be >= 0");
        if (drive1 < 0.0 || drive2 < 0.0) throw std::invalid_argument("SystemParams: drive amplitudes must be >= 0");
    }

    // Full checks required by the dissipative solvers.
    void validate() const {
        validate_structure();
        if (kappa <= 0.0) throw std::invalid_argument("SystemParams: kappa must be > 0");
    }

    SystemParams with_g(double gg) const {
        SystemParams p = *this;
        p.g = gg;
        return p;
    }
    SystemParams with_delta_tilde(double dt) const {
        SystemParams p = *this;
        p.delta_tilde = dt;
        return p;
    }
    SystemParams with_gamma(double gm) const {
        SystemParams p = *this;
        p.gamma = gm;
        return p;
    }
    SystemParams without_drive1() const {
        SystemParams p = *this;
        p.drive1 = 0.0;
        return p;
    }
    SystemParams without_drive2() const {
        SystemParams p = *this;
        p.drive2 = 0.0;
        return p;
    }
};

} // namespace pcs
