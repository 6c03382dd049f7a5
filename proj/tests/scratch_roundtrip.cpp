// Development scratch: designer round trip through the reduced model.
// Not part of the build.
#include <cstdio>
#include <numbers>

#include "raman/designer.hpp"
#include "raman/reduced.hpp"
#include "raman/units.hpp"

using namespace raman;

static void roundtrip(const DesignTarget& target, const SystemParams& p, const char* label) {
    DesignResult d = design_send_pulse(target, p);
    ReducedRun run = integrate_reduced(d.omega, nullptr, ReducedState{cd(1.0), 0.0, 0.0}, p);
    const cd ov = wavepacket_inner(target.shape, run.alpha_out);
    const double n = run.photon_number;
    std::printf("%-22s margin=% .3e  n=%.6f (sin2=%.6f)  |ov|^2=%.6f  |be1|^2=%.6f  phi=% .4f\n",
                label, d.feasibility_margin, n, d.photon_number, std::norm(ov),
                std::norm(run.states.back().beta_e), d.predicted_phase_phi);
}

int main() {
    SystemParams p = SystemParams::standard();
    const double gr = p.gamma;
    std::printf("gamma rate = %.6f ps^-1, 6/gamma = %.4f ps\n", gr, 6.0 / gr);

    TimeGrid grid(-150.0, 150.0, 6000);
    const double w = 6.0 / gr;

    roundtrip(DesignTarget::sech(grid, w, 0.0, std::numbers::pi / 2), p, "sech w=6/g th=pi/2");
    roundtrip(DesignTarget::sech(grid, w, 0.0, std::numbers::pi / 4), p, "sech w=6/g th=pi/4");
    roundtrip(DesignTarget::sech(grid, w, 0.0, std::numbers::pi / 6), p, "sech w=6/g th=pi/6");
    roundtrip(DesignTarget::gaussian(grid, 12.0, 0.0, std::numbers::pi / 3), p, "gauss s=12 th=pi/3");

    // chirped target: checks the phase-accumulation sign in solve_beta_e
    {
        DesignTarget t = DesignTarget::sech(grid, w, 0.0, std::numbers::pi / 4);
        const double chirp = 0.01;  // ps^-2
        ComplexEnvelope f(grid), d1(grid), d2(grid);
        for (int i = 0; i < grid.size(); ++i) {
            const double tt = grid.time(i);
            const cd ph = std::polar(1.0, chirp * tt * tt);
            const cd ip2 = cd(0.0, 2.0 * chirp * tt);
            f[i] = t.shape.envelope[i] * ph;
            d1[i] = (t.d1[i] + t.shape.envelope[i] * ip2) * ph;
            d2[i] = (t.d2[i] + 2.0 * t.d1[i] * ip2 +
                     t.shape.envelope[i] * (ip2 * ip2 + cd(0.0, 2.0 * chirp))) *
                    ph;
        }
        DesignTarget c;
        c.shape = Wavepacket(f, 1.0);
        c.theta = std::numbers::pi / 4;
        c.kind = ShapeKind::sampled;
        c.d1 = d1;
        c.d2 = d2;
        roundtrip(c, p, "chirped sech th=pi/4");
    }

    // receive: design for the paper sech, drive with the packet itself
    {
        DesignTarget t = DesignTarget::sech(grid, w, 0.0, std::numbers::pi / 2);
        DesignResult r = design_receive_pulse(t, p);
        ReducedRun run = reduced_receive(Wavepacket(t.shape.envelope, 1.0), r.omega, p);
        std::printf("receive: absorption=%.8f reflection=%.3e  arg be=% .4f (pred % .4f)\n",
                    run.absorption, run.reflection, std::arg(run.states.back().beta_e),
                    r.predicted_phase_phi);
    }

    // infeasible: 5x compressed full-emission target
    try {
        DesignTarget t = DesignTarget::sech(grid, w / 5.0, 0.0, std::numbers::pi / 2);
        feasibility_profile(t, p);
        std::printf("compressed target: NOT rejected (bug)\n");
    } catch (const InfeasibleError& e) {
        std::printf("compressed target: infeasible, margin=% .4f at t=%.2f ps\n", e.margin,
                    e.t_violation);
    }

    // frozen-value candidates
    {
        DesignTarget t = DesignTarget::sech(grid, w, 0.0, std::numbers::pi / 2);
        FeasibilityProfile fp = feasibility_profile(t, p);
        std::printf("paper target: P_e(t0)=%.9f (expect 1/3... at t=-150)  margin=%.3e\n",
                    fp.p_e[0], fp.margin);
        Wavepacket a(t.shape.envelope, 1.0);
        DesignTarget t2 = DesignTarget::sech(grid, 4.0 / gr, 0.0, std::numbers::pi / 2);
        Wavepacket b(t2.shape.envelope, 1.0);
        const cd ov = wavepacket_inner(a, b);
        std::printf("inner(sech6,sech4) = %.15f %+.3e i\n", ov.real(), ov.imag());
    }
    return 0;
}
