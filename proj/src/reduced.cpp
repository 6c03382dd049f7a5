#include "raman/reduced.hpp"

#include <cmath>

namespace raman {

namespace {

struct Deriv {
    cd de, dt_, dc;
};

inline Deriv rhs(const ReducedState& s, cd omega, cd alpha_in, const SystemParams& p,
                 double sqg) {
    return {-0.5 * std::conj(omega) * s.beta_t,
            0.5 * omega * s.beta_e + std::conj(p.g_cav) * s.beta_c,
            -0.5 * p.gamma * s.beta_c - p.g_cav * s.beta_t - sqg * alpha_in};
}

inline ReducedState advance(const ReducedState& s, const Deriv& d, double h) {
    return {s.beta_e + h * d.de, s.beta_t + h * d.dt_, s.beta_c + h * d.dc};
}

}  // namespace

ReducedRun integrate_reduced(const ComplexEnvelope& omega, const ComplexEnvelope* alpha_in,
                             const ReducedState& init, const SystemParams& params) {
    params.validate();
    omega.check_finite("integrate_reduced omega");
    if (alpha_in) {
        require_same_grid(omega.grid, alpha_in->grid, "integrate_reduced");
        alpha_in->check_finite("integrate_reduced alpha_in");
    }
    const TimeGrid& grid = omega.grid;
    const double dt = grid.dt();
    const double sqg = params.sqrt_gamma();

    ReducedRun run;
    run.grid = grid;
    run.states.resize(grid.size());
    run.alpha_out_raw = ComplexEnvelope(grid);
    run.states[0] = init;

    auto ain = [&](int i) { return alpha_in ? (*alpha_in)[i] : cd(0.0); };
    auto ain_mid = [&](int i) { return alpha_in ? alpha_in->mid(i) : cd(0.0); };

    run.alpha_out_raw[0] = input_output(ain(0), init.beta_c, params);

    // flux bookkeeping: emitted minus injected probability so far
    double flux = 0.0;
    double out_prev = std::norm(run.alpha_out_raw[0]) - std::norm(ain(0));
    run.norm_defect = 0.0;
    const double n_ref = init.norm2();  // conserved total of the tracked chain

    for (int i = 0; i < grid.n_steps; ++i) {
        const ReducedState& s = run.states[i];
        const cd om0 = omega[i], om1 = omega.mid(i), om2 = omega[i + 1];
        const cd a0 = ain(i), a1 = ain_mid(i), a2 = ain(i + 1);

        const Deriv k1 = rhs(s, om0, a0, params, sqg);
        const Deriv k2 = rhs(advance(s, k1, 0.5 * dt), om1, a1, params, sqg);
        const Deriv k3 = rhs(advance(s, k2, 0.5 * dt), om1, a1, params, sqg);
        const Deriv k4 = rhs(advance(s, k3, dt), om2, a2, params, sqg);

        ReducedState next;
        next.beta_e = s.beta_e + dt / 6.0 * (k1.de + 2.0 * k2.de + 2.0 * k3.de + k4.de);
        next.beta_t = s.beta_t + dt / 6.0 * (k1.dt_ + 2.0 * k2.dt_ + 2.0 * k3.dt_ + k4.dt_);
        next.beta_c = s.beta_c + dt / 6.0 * (k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc);
        run.states[i + 1] = next;
        run.alpha_out_raw[i + 1] = input_output(a2, next.beta_c, params);

        const double out_now = std::norm(run.alpha_out_raw[i + 1]) - std::norm(a2);
        flux += 0.5 * dt * (out_prev + out_now);
        out_prev = out_now;
        const double defect = std::abs(next.norm2() + flux - n_ref);
        if (defect > run.norm_defect) run.norm_defect = defect;
    }

    if (run.norm_defect > 1e-4)
        throw IntegrationError("integrate_reduced: flux bookkeeping defect " +
                               std::to_string(run.norm_defect) + " (step too coarse?)");

    run.alpha_out = Wavepacket::from_raw(run.alpha_out_raw);
    run.photon_number = run.alpha_out.mean_photon_number;
    run.reflection = run.photon_number;
    run.absorption = std::norm(run.states.back().beta_e);
    return run;
}

ReducedRun reduced_receive(const Wavepacket& incoming, const ComplexEnvelope& omega,
                           const SystemParams& params) {
    require_same_grid(incoming.envelope.grid, omega.grid, "reduced_receive");
    ComplexEnvelope drive = incoming.envelope;
    const double amp = std::sqrt(incoming.mean_photon_number);
    for (cd& x : drive.v) x *= amp;
    return integrate_reduced(omega, &drive, ReducedState{}, params);
}

}  // namespace raman
