#pragma once

#include "raman/grid.hpp"

namespace raman {

// Single-photon wavepacket: a unit-norm temporal envelope plus the mean
// photon number it carries. The envelope is normalized so that
// integral |envelope|^2 dt = 1 (trapezoidal rule on its own grid); the
// physical field amplitude is sqrt(mean_photon_number) * envelope.
//
// The zero packet (no photon at all) is represented by an all-zero envelope
// with mean_photon_number = 0 and is exempt from the normalization check.
struct Wavepacket {
    ComplexEnvelope envelope;
    double mean_photon_number = 0.0;

    static constexpr double norm_tol = 1e-6;

    Wavepacket() = default;

    // Takes an already-normalized envelope. Throws if the norm is off.
    Wavepacket(ComplexEnvelope env, double n_photon);

    // Builds from a raw (unnormalized) field amplitude: the photon number is
    // extracted as integral |raw|^2 dt and the envelope rescaled to unit norm.
    static Wavepacket from_raw(const ComplexEnvelope& raw);

    bool is_vacuum() const { return mean_photon_number == 0.0; }

    // Raw field amplitude at sample i: sqrt(n) * envelope.
    cd amplitude(int i) const;
};

// Overlap <a|b> = integral conj(a) b dt of the normalized envelopes.
// Conjugate symmetric: wavepacket_inner(a,b) == conj(wavepacket_inner(b,a))
// bit-exactly. Throws GridMismatchError when the grids differ.
cd wavepacket_inner(const Wavepacket& a, const Wavepacket& b);

}  // namespace raman
