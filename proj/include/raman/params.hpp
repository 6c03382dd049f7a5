#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "raman/units.hpp"

namespace raman {

// Physical parameters of one cavity-QED node. All rates are angular
// frequencies in ps^-1; use from_energies() to construct from meV values.
//
// Level scheme: spin ground states |g>, |e> split by delta_zeeman; two
// degenerate trion states |t>, |tbar>. The cavity couples |g>-|t> and
// |e>-|tbar| with strength g_cav; the laser drives the cross legs |e>-|t>
// and |g>-|tbar>. With the laser and cavity two-photon resonant with the
// |e> -> |g> Raman transition, the non-resonant legs oscillate at the
// Zeeman splitting.
struct SystemParams {
    std::complex<double> g_cav{0.0, 0.0};  // cavity coupling, ps^-1
    double gamma = 0.0;                    // cavity decay into the channel, ps^-1
    double gamma0 = 0.0;                   // intrinsic cavity loss, ps^-1
    double Gamma_trion = 0.0;              // trion spontaneous emission, ps^-1
    double delta_zeeman = 0.0;             // spin splitting w_e - w_g, ps^-1
    int n_max = 3;                         // cavity Fock cutoff
    std::optional<double> omega_c_abs_ev;  // absolute cavity frequency (eV), optional

    static SystemParams from_energies(double g_cav_mev, double gamma_mev, double gamma0_mev,
                                      double Gamma_mev, double zeeman_mev, int n_max,
                                      std::optional<double> omega_c_ev = std::nullopt) {
        SystemParams p;
        p.g_cav = energy_to_rate(g_cav_mev);
        p.gamma = energy_to_rate(gamma_mev);
        p.gamma0 = energy_to_rate(gamma0_mev);
        p.Gamma_trion = energy_to_rate(Gamma_mev);
        p.delta_zeeman = energy_to_rate(zeeman_mev);
        p.n_max = n_max;
        p.omega_c_abs_ev = omega_c_ev;
        p.validate();
        return p;
    }

    // Paper-scale defaults used throughout the examples: g = 0.1 meV,
    // gamma = 0.2 meV, gamma0 = 0.1 ueV, Gamma = 3 ueV, Zeeman 1 meV.
    static SystemParams standard(int n_max = 3) {
        return from_energies(0.1, 0.2, 1e-4, 3e-3, 1.0, n_max);
    }

    // gamma = 0 and g_cav = 0 are allowed here so decoupled-node setups can
    // be expressed; the pulse designer separately requires both nonzero.
    void validate() const {
        if (gamma < 0.0) throw std::invalid_argument("SystemParams: gamma must be >= 0");
        if (gamma0 < 0.0) throw std::invalid_argument("SystemParams: gamma0 must be >= 0");
        if (Gamma_trion < 0.0) throw std::invalid_argument("SystemParams: Gamma_trion must be >= 0");
        if (n_max < 1) throw std::invalid_argument("SystemParams: n_max must be >= 1");
        if (omega_c_abs_ev) {
            // Flat-bath (Weisskopf-Wigner) treatment of the channel needs the
            // decay to be slow on the optical carrier scale.
            const double ratio = rate_to_energy(gamma) / (*omega_c_abs_ev * 1000.0);
            if (!(ratio < 1e-3))
                throw std::invalid_argument("SystemParams: gamma/omega_c = " + std::to_string(ratio) +
                                            " too large for a flat-bath channel");
        }
    }

    double sqrt_gamma() const { return std::sqrt(gamma); }

    // Channel coupling kappa in the flat-bath convention sqrt(2 pi) kappa = sqrt(gamma),
    // taken real and positive.
    double kappa() const { return std::sqrt(gamma / (2.0 * std::numbers::pi)); }
};

}  // namespace raman
