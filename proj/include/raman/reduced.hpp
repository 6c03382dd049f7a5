#pragma once

#include <vector>

#include "raman/params.hpp"
#include "raman/wavepacket.hpp"

namespace raman {

// Amplitudes of the resonant single-excitation chain |e,0>, |t,0>, |g,1>.
// The |g,0> component never moves and is not tracked.
struct ReducedState {
    cd beta_e{0.0};
    cd beta_t{0.0};
    cd beta_c{0.0};

    double norm2() const { return std::norm(beta_e) + std::norm(beta_t) + std::norm(beta_c); }
};

struct ReducedRun {
    TimeGrid grid;
    std::vector<ReducedState> states;  // one per grid sample
    ComplexEnvelope alpha_out_raw;     // output field alpha_in + sqrt(gamma) beta_c
    Wavepacket alpha_out;              // same, normalized, with extracted photon number
    double photon_number = 0.0;        // integral |alpha_out_raw|^2 dt
    double norm_defect = 0.0;          // max |1 - N(t)| of the flux bookkeeping
    double absorption = 0.0;           // |beta_e(t1)|^2
    double reflection = 0.0;           // photon number left in the channel
};

// Integrates the lossless resonant Raman chain
//   beta_e' = -conj(Omega)/2 beta_t
//   beta_t' =  Omega/2 beta_e + conj(g) beta_c
//   beta_c' = -gamma/2 beta_c - g beta_t - sqrt(gamma) alpha_in
// with fixed-step RK4 (envelopes linearly interpolated at half steps) and
// records the output field alpha_out = alpha_in + sqrt(gamma) beta_c.
//
// Flux bookkeeping N(t) = |beta|^2 + integral (|alpha_out|^2 - |alpha_in|^2)
// must stay at 1; a defect above 1e-4 throws IntegrationError.
ReducedRun integrate_reduced(const ComplexEnvelope& omega, const ComplexEnvelope* alpha_in,
                             const ReducedState& init, const SystemParams& params);

// Input-output relation at one instant.
inline cd input_output(cd alpha_in, cd beta_c, const SystemParams& params) {
    return alpha_in + params.sqrt_gamma() * beta_c;
}

// Drives the empty node with an incoming packet and the given absorption
// pulse. absorption = |beta_e(t1)|^2, reflection = integral |alpha_out|^2.
ReducedRun reduced_receive(const Wavepacket& incoming, const ComplexEnvelope& omega,
                           const SystemParams& params);

}  // namespace raman
