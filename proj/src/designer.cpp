#include "raman/designer.hpp"

#include <cmath>
#include <numbers>

namespace raman {

namespace {

// Shared intermediate arrays of the design equations.
struct DesignArrays {
    ComplexEnvelope beta_c, dbeta_c, s, sdot;  // S = beta_c' + gamma/2 beta_c
    std::vector<double> cum;                   // cumulative norm of the target shape
};

DesignArrays build_arrays(const DesignTarget& target, const SystemParams& params) {
    if (!(params.gamma > 0.0) || !(std::abs(params.g_cav) > 0.0))
        throw std::invalid_argument("pulse design requires gamma > 0 and g_cav != 0");
    const TimeGrid& grid = target.shape.envelope.grid;
    const double st = std::sin(target.theta);
    const double a = st / params.sqrt_gamma();
    const double hg = 0.5 * params.gamma;
    DesignArrays out{ComplexEnvelope(grid), ComplexEnvelope(grid), ComplexEnvelope(grid),
                     ComplexEnvelope(grid), cumtrapz_abs2(target.shape.envelope)};
    for (int i = 0; i < grid.size(); ++i) {
        out.beta_c[i] = a * target.shape.envelope[i];
        out.dbeta_c[i] = a * target.d1[i];
        const cd d2 = a * target.d2[i];
        out.s[i] = out.dbeta_c[i] + hg * out.beta_c[i];
        out.sdot[i] = d2 + hg * out.dbeta_c[i];
    }
    return out;
}

FeasibilityProfile budget(const DesignTarget& target, const SystemParams& params,
                          const DesignArrays& ar) {
    const TimeGrid& grid = target.shape.envelope.grid;
    const double s2 = std::sin(target.theta) * std::sin(target.theta);
    const double g2 = std::norm(params.g_cav);
    FeasibilityProfile fp;
    fp.p_e.resize(grid.size());
    fp.margin = 2.0;
    for (int i = 0; i < grid.size(); ++i) {
        double p = 1.0 - s2 * ar.cum[i] - std::norm(ar.beta_c[i]) - std::norm(ar.s[i]) / g2;
        // A full-emission budget runs to zero at the window edge, where grid
        // renormalization of a sampled shape can leave a dip of the order of
        // the squared edge samples. Anything less negative than -1e-6 is
        // numerically indistinguishable from zero (well inside the clip
        // region) and must not read as a violation.
        if (p < 0.0 && p > -1e-6) p = 0.0;
        fp.p_e[i] = p;
        if (p < fp.margin) {
            fp.margin = p;
            fp.t_min = grid.time(i);
        }
    }
    return fp;
}

// d/dt arg beta_e follows from substituting the designed pulse back into the
// equation of motion for beta_e:
//   phi' = [ Im(S' conj S)/|g|^2 - Im(beta_c' conj beta_c) ] / P_e,
// i.e. the |S|^2-weighted phase velocity of S minus the |beta_c|^2-weighted
// phase velocity of beta_c. Written with Im(x' conj x) instead of
// |x|^2 d(arg x)/dt so that zeros of S or beta_c need no special casing.
// Identically zero for real targets.
std::vector<double> phase_rate(const DesignArrays& ar, const std::vector<double>& p_e,
                               double g2, double clip_eps) {
    std::vector<double> r(p_e.size(), 0.0);
    for (size_t i = 0; i < p_e.size(); ++i) {
        if (p_e[i] < clip_eps) continue;  // phase frozen where the budget is exhausted
        const double num = std::imag(ar.sdot[i] * std::conj(ar.s[i])) / g2 -
                           std::imag(ar.dbeta_c[i] * std::conj(ar.beta_c[i]));
        r[i] = num / p_e[i];
    }
    return r;
}

std::vector<double> accumulate_phase(const TimeGrid& grid, const std::vector<double>& rate) {
    std::vector<double> phi(rate.size());
    phi[0] = 0.0;
    const double dt = grid.dt();
    for (size_t i = 0; i + 1 < rate.size(); ++i)
        phi[i + 1] = phi[i] + 0.5 * dt * (rate[i] + rate[i + 1]);
    return phi;
}

}  // namespace

ComplexEnvelope cavity_amplitude_from_target(const DesignTarget& target,
                                             const SystemParams& params) {
    return build_arrays(target, params).beta_c;
}

FeasibilityProfile feasibility_profile(const DesignTarget& target, const SystemParams& params,
                                       double floor) {
    const DesignArrays ar = build_arrays(target, params);
    FeasibilityProfile fp = budget(target, params, ar);
    if (fp.margin < floor) throw InfeasibleError(fp.t_min, fp.margin);
    return fp;
}

ComplexEnvelope solve_beta_e(const DesignTarget& target, const SystemParams& params,
                             const DesignOptions& opts) {
    const DesignArrays ar = build_arrays(target, params);
    const FeasibilityProfile fp = budget(target, params, ar);
    if (fp.margin < opts.feasibility_floor) throw InfeasibleError(fp.t_min, fp.margin);
    const TimeGrid& grid = target.shape.envelope.grid;
    const auto rate = phase_rate(ar, fp.p_e, std::norm(params.g_cav), opts.clip_eps);
    const auto phi = accumulate_phase(grid, rate);
    ComplexEnvelope be(grid);
    for (int i = 0; i < grid.size(); ++i)
        be[i] = std::sqrt(std::max(fp.p_e[i], 0.0)) * std::polar(1.0, phi[i]);
    return be;
}

DesignResult design_send_pulse(const DesignTarget& target, const SystemParams& params,
                               const DesignOptions& opts) {
    const TimeGrid& grid = target.shape.envelope.grid;
    const DesignArrays ar = build_arrays(target, params);
    const FeasibilityProfile fp = budget(target, params, ar);
    if (fp.margin < opts.feasibility_floor) throw InfeasibleError(fp.t_min, fp.margin);

    const double g2 = std::norm(params.g_cav);
    const auto rate = phase_rate(ar, fp.p_e, g2, opts.clip_eps);
    const auto phi = accumulate_phase(grid, rate);

    DesignResult res;
    res.beta_c = ar.beta_c;
    res.beta_e = ComplexEnvelope(grid);
    res.omega = ComplexEnvelope(grid);
    res.p_e = fp.p_e;
    res.feasibility_margin = fp.margin;
    res.photon_number = std::sin(target.theta) * std::sin(target.theta);

    const int n = grid.size();
    int i_clip = n;  // first sample where the budget is exhausted
    for (int i = 0; i < n; ++i) {
        if (fp.p_e[i] < opts.clip_eps) {
            i_clip = i;
            break;
        }
        res.beta_e[i] = std::sqrt(fp.p_e[i]) * std::polar(1.0, phi[i]);
        res.omega[i] = -2.0 * (std::conj(params.g_cav) * ar.beta_c[i] + ar.sdot[i] / params.g_cav) /
                       res.beta_e[i];
    }

    if (i_clip < n) {
        res.clipped = true;
        res.clip_time_ps = grid.time(i_clip);
        // The designed modulus continues to fall after the clip even though
        // the pulse is switched off; keep the profile for diagnostics.
        for (int i = i_clip; i < n; ++i)
            res.beta_e[i] = std::sqrt(std::max(fp.p_e[i], 0.0)) * std::polar(1.0, phi[i]);
        const cd last = (i_clip > 0) ? res.omega[i_clip - 1] : cd(0.0);
        const int ramp_steps =
            std::max(0, static_cast<int>(std::llround(opts.ramp_time_ps / grid.dt())));
        for (int k = 0; k < ramp_steps && i_clip + k < n; ++k) {
            const double w =
                0.5 * (1.0 + std::cos(std::numbers::pi * (k + 1) / ramp_steps));
            res.omega[i_clip + k] = last * w;
        }
        // zero from the end of the ramp onward (already zero-initialized)
        res.predicted_phase_phi = phi[i_clip > 0 ? i_clip - 1 : 0];
    } else {
        res.predicted_phase_phi = phi[n - 1];
    }
    res.omega.check_finite("design_send_pulse omega");
    return res;
}

namespace {

DesignResult receive_from_reversed(const DesignTarget& rev_target, const SystemParams& params,
                                   const DesignOptions& opts) {
    DesignResult fwd = design_send_pulse(rev_target, params, opts);
    DesignResult res;
    res.omega = fwd.omega.reversed_conj();
    // Absorption trajectories for an incoming packet equal to the (unit-norm)
    // conj-reversed emission: beta(t) = -conj(beta_fwd(T - t)). The overall
    // minus is a fixed, known phase on the absorbed |e> amplitude.
    res.beta_c = fwd.beta_c.reversed_conj();
    res.beta_e = fwd.beta_e.reversed_conj();
    for (cd& x : res.beta_c.v) x = -x;
    for (cd& x : res.beta_e.v) x = -x;
    res.p_e.assign(fwd.p_e.rbegin(), fwd.p_e.rend());
    res.feasibility_margin = fwd.feasibility_margin;
    res.clipped = fwd.clipped;
    const TimeGrid& g = fwd.omega.grid;
    res.clip_time_ps = fwd.clipped ? (g.t_start + g.t_end - fwd.clip_time_ps) : 0.0;
    res.photon_number = fwd.photon_number;
    const cd be_final = res.beta_e[res.beta_e.size() - 1];
    res.predicted_phase_phi = std::arg(be_final);
    return res;
}

}  // namespace

DesignResult design_receive_pulse(const Wavepacket& incoming, const SystemParams& params,
                                  const DesignOptions& opts) {
    if (incoming.is_vacuum())
        throw std::invalid_argument("design_receive_pulse: incoming packet is vacuum");
    const Wavepacket rev(incoming.envelope.reversed_conj(), 1.0);
    return receive_from_reversed(DesignTarget::sampled(rev, std::numbers::pi / 2.0), params,
                                 opts);
}

DesignResult design_receive_pulse(const DesignTarget& incoming, const SystemParams& params,
                                  const DesignOptions& opts) {
    DesignTarget rev = incoming.reversed();
    rev.theta = std::numbers::pi / 2.0;  // absorption always runs the full cycle
    return receive_from_reversed(rev, params, opts);
}

}  // namespace raman
