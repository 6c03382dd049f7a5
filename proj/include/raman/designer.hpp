#pragma once

#include <vector>

#include "raman/params.hpp"
#include "raman/shapes.hpp"

namespace raman {

struct DesignOptions {
    // Reject the target when the excited-state population budget dips below
    // this floor anywhere in the window.
    double feasibility_floor = 0.0;
    // Once |beta_e|^2 falls below this value the division by beta_e in the
    // pulse formula is no longer trustworthy; the pulse is ramped to zero.
    double clip_eps = 1e-5;
    // Duration of the raised-cosine switch-off after the clip point. Must be
    // slow against the Zeeman precession (2 pi hbar / Delta, about 4 ps at
    // 1 meV): a sudden cut strands the virtually excited off-resonant trion
    // amplitude instead of returning it to the ground state.
    double ramp_time_ps = 10.0;
};

// Excited-state population budget P_e(t): what remains for |beta_e|^2 after
// the emitted field, the cavity amplitude and the trion amplitude take their
// shares. The target is realizable iff P_e stays non-negative.
struct FeasibilityProfile {
    std::vector<double> p_e;
    double margin = 0.0;  // min over the window
    double t_min = 0.0;   // time (ps) where the minimum occurs
};

struct DesignResult {
    ComplexEnvelope omega;   // designed Rabi frequency (ps^-1)
    ComplexEnvelope beta_c;  // cavity amplitude implied by the target
    ComplexEnvelope beta_e;  // designed spin amplitude sqrt(P_e) e^{i phi}
    std::vector<double> p_e;
    double predicted_phase_phi = 0.0;  // arg beta_e at the end of the design
    double feasibility_margin = 0.0;
    bool clipped = false;
    double clip_time_ps = 0.0;
    double photon_number = 0.0;  // sin^2 theta
};

// beta_c(t) = sin(theta) f(t) / sqrt(gamma) for target shape f.
ComplexEnvelope cavity_amplitude_from_target(const DesignTarget& target,
                                             const SystemParams& params);

// Evaluates P_e(t); throws InfeasibleError when min P_e < floor. Values
// within 1e-12 of zero are clamped to zero first, so the exact-zero tail of a
// full-emission (theta = pi/2) design does not trip the floor through
// rounding noise.
FeasibilityProfile feasibility_profile(const DesignTarget& target, const SystemParams& params,
                                       double floor = 0.0);

// |beta_e| from the population budget, arg beta_e accumulated from the phase
// evolution implied by the equations of motion. The phase is frozen once the
// budget drops below clip_eps.
ComplexEnvelope solve_beta_e(const DesignTarget& target, const SystemParams& params,
                             const DesignOptions& opts = {});

// Full emission design: the Rabi frequency Omega(t) that makes the node emit
// sin(theta) * f(t) into the channel, moving |e> -> cos(theta)|e> + ... .
DesignResult design_send_pulse(const DesignTarget& target, const SystemParams& params,
                               const DesignOptions& opts = {});

// Absorption design by time reversal: the pulse that absorbs the incoming
// packet into |e>. Built by designing the emission of the conj-reversed
// packet and reversing the pulse, Omega_recv(t) = conj(Omega_send(t0+t1-t)).
// Exact for real g_cav. The returned beta envelopes are the predicted
// absorption trajectories.
DesignResult design_receive_pulse(const Wavepacket& incoming, const SystemParams& params,
                                  const DesignOptions& opts = {});

// Same, but with closed-form derivatives when the incoming packet shape is
// known analytically (the incoming theta is ignored; absorption always runs
// the full cycle).
DesignResult design_receive_pulse(const DesignTarget& incoming, const SystemParams& params,
                                  const DesignOptions& opts = {});

}  // namespace raman
