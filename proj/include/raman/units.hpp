#pragma once

namespace raman {

// hbar in meV*ps. All rates and angular frequencies inside the library are
// kept in ps^-1; energies cross this boundary exactly once, on input.
inline constexpr double hbar_mev_ps = 0.6582119569;

// Energy (meV) -> angular frequency (ps^-1). 0.2 meV -> 0.30385 ps^-1.
inline constexpr double energy_to_rate(double energy_mev) {
    return energy_mev / hbar_mev_ps;
}

inline constexpr double rate_to_energy(double rate_ps) {
    return rate_ps * hbar_mev_ps;
}

}  // namespace raman
