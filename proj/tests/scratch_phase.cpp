// Development scratch: isolate the beta_e phase equation by checking the
// residual of beta_e' = -conj(Omega)/2 beta_t on the designed trajectories,
// for both candidate signs of the cavity-phase term.
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "raman/designer.hpp"
#include "raman/reduced.hpp"

using namespace raman;

int main() {
    SystemParams p = SystemParams::standard();
    TimeGrid grid(-150.0, 150.0, 6000);
    const double w = 6.0 / p.gamma;

    DesignTarget base = DesignTarget::sech(grid, w, 0.0, std::numbers::pi / 4);
    const double chirp = 0.01;
    ComplexEnvelope f(grid), d1(grid), d2(grid);
    for (int i = 0; i < grid.size(); ++i) {
        const double tt = grid.time(i);
        const cd ph = std::polar(1.0, chirp * tt * tt);
        const cd ip2 = cd(0.0, 2.0 * chirp * tt);
        f[i] = base.shape.envelope[i] * ph;
        d1[i] = (base.d1[i] + base.shape.envelope[i] * ip2) * ph;
        d2[i] = (base.d2[i] + 2.0 * base.d1[i] * ip2 +
                 base.shape.envelope[i] * (ip2 * ip2 + cd(0.0, 2.0 * chirp))) *
                ph;
    }
    DesignTarget target;
    target.shape = Wavepacket(f, 1.0);
    target.theta = std::numbers::pi / 4;
    target.kind = ShapeKind::sampled;
    target.d1 = d1;
    target.d2 = d2;

    // rebuild the designer internals for both phase-sign conventions
    const double st = std::sin(target.theta);
    const double a = st / p.sqrt_gamma();
    const double hg = 0.5 * p.gamma;
    const double g2 = std::norm(p.g_cav);
    const int n = grid.size();
    std::vector<cd> bc(n), dbc(n), S(n), Sd(n);
    std::vector<double> cum = cumtrapz_abs2(target.shape.envelope), pe(n);
    for (int i = 0; i < n; ++i) {
        bc[i] = a * f[i];
        dbc[i] = a * d1[i];
        S[i] = dbc[i] + hg * bc[i];
        Sd[i] = a * d2[i] + hg * dbc[i];
        pe[i] = 1.0 - st * st * cum[i] - std::norm(bc[i]) - std::norm(S[i]) / g2;
    }

    for (int sign = -1; sign <= 1; sign += 2) {
        std::vector<double> phi(n, 0.0), rate(n, 0.0);
        for (int i = 0; i < n; ++i) {
            rate[i] = (std::imag(Sd[i] * std::conj(S[i])) / g2 +
                       sign * std::imag(dbc[i] * std::conj(bc[i]))) /
                      pe[i];
        }
        const double dt = grid.dt();
        for (int i = 0; i + 1 < n; ++i) phi[i + 1] = phi[i] + 0.5 * dt * (rate[i] + rate[i + 1]);

        std::vector<cd> be(n), om(n), bt(n);
        for (int i = 0; i < n; ++i) {
            be[i] = std::sqrt(pe[i]) * std::polar(1.0, phi[i]);
            om[i] = -2.0 * (std::conj(p.g_cav) * bc[i] + Sd[i] / p.g_cav) / be[i];
            bt[i] = -S[i] / p.g_cav;
        }
        // residual of (1a) by central differences, away from the edges
        double rmax = 0.0;
        for (int i = 10; i < n - 10; ++i) {
            const cd dbe = (be[i + 1] - be[i - 1]) / (2.0 * dt);
            const cd res = dbe + 0.5 * std::conj(om[i]) * bt[i];
            rmax = std::max(rmax, std::abs(res));
        }
        // round trip
        ComplexEnvelope omega(grid);
        for (int i = 0; i < n; ++i) omega[i] = om[i];
        ReducedRun run = integrate_reduced(omega, nullptr, ReducedState{cd(1.0), 0.0, 0.0}, p);
        const cd ov = wavepacket_inner(target.shape, run.alpha_out);
        std::printf("sign %+d: residual_max=%.3e  |ov|^2=%.8f  n=%.8f\n", sign, rmax,
                    std::norm(ov), run.photon_number);
    }
    return 0;
}
