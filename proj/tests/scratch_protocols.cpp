// Dev scratch for the protocol layer. Build:
//   g++ -std=c++20 -O2 -march=native -Iinclude -Ivendor -I/usr/include/eigen3 \
//     tests/scratch_protocols.cpp src/wavepacket.cpp src/hilbert.cpp src/shapes.cpp \
//     src/designer.cpp src/reduced.cpp src/node_model.cpp src/cascade.cpp \
//     src/protocols.cpp -o /tmp/scratch_protocols
// Usage: /tmp/scratch_protocols [part ...]   (default: 1-10, 11 = cardinal)
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

#include "raman/errors.hpp"
#include "raman/node_model.hpp"
#include "raman/protocols.hpp"

using namespace raman;

static TimeGrid kGrid{-100.0, 100.0, 4000};

static DesignTarget carrier4(int = 0) {
    const double gamma = SystemParams::standard().gamma;
    return DesignTarget::sech(kGrid, 4.0 / gamma, 0.0, std::numbers::pi / 2.0);
}

static TwoNodeConfig link2() {
    TwoNodeConfig l;
    l.node1 = SystemParams::standard(2);
    l.node2 = SystemParams::standard(2);
    return l;
}

static void dump(const char* tag, const ProtocolResult& r) {
    std::printf("== %s (%s)\n", tag, r.method.c_str());
    for (const auto& [k, v] : r.metrics) {
        if (r.stderrs.count(k))
            std::printf("   %-24s %.9f +- %.3e\n", k.c_str(), v, r.stderrs.at(k));
        else
            std::printf("   %-24s %.9f\n", k.c_str(), v);
    }
    for (const auto& [k, v] : r.amplitudes)
        std::printf("   amp %-20s %.9f %+.9fi  (|.| %.9f)\n", k.c_str(), v.real(), v.imag(),
                    std::abs(v));
}

int main(int argc, char** argv) {
    std::set<int> parts;
    for (int i = 1; i < argc; ++i) parts.insert(std::atoi(argv[i]));
    auto want = [&](int p) { return parts.empty() ? p <= 10 : parts.count(p) > 0; };

    if (want(1)) {
        TransferSetup s;
        s.carrier = carrier4();
        s.link = link2();
        dump("1 transfer_master equal", transfer_master(s));
        std::printf("   expect fidelity 0.987421, p_gg 0.511633, p_ge 0.486264, coh 0.488473\n");
    }

    if (want(2)) {
        TransferSetup s;
        s.carrier = carrier4();
        s.link = link2();
        dump("2 transfer_reduced equal", transfer_reduced(s));
    }

    if (want(3)) {
        TransferSetup s;
        s.carrier = carrier4();
        s.link = link2();
        s.initial = QubitAmplitudes::ground();
        dump("3a transfer_master C_e=0", transfer_master(s));
        s.initial = QubitAmplitudes::excited();
        ProtocolResult r = transfer_master(s);
        dump("3b transfer_master C_g=0", r);
        DesignTarget tgt = s.carrier;
        tgt.theta = std::numbers::pi / 2.0;
        DesignResult d1 = design_send_pulse(tgt, s.link.node1, s.link.design);
        SendOutcome sent = send_full(QubitAmplitudes::excited(), d1.omega, s.link.node1, {}, &tgt);
        DesignResult d2 = design_receive_pulse(tgt, s.link.node2, s.link.design);
        ProtocolResult rec = receive_full(sent.packet, d2.omega, s.link.node2);
        const double product = sent.p_one * rec.metrics.at("absorption");
        std::printf("   product p_one*absorption = %.6f * %.6f = %.9f, F - product = %+.3e\n",
                    sent.p_one, rec.metrics.at("absorption"), product,
                    r.metrics.at("fidelity") - product);
    }

    if (want(4)) {
        EntangleSetup s;
        s.carrier = carrier4();
        s.link = link2();
        dump("4 entangle_master pi/4", entangle_master(s));
        std::printf("   expect |g1e2| 0.6920, |e1g2| 0.7116, outside 0.0147, F 0.991456, "
                    "S 0.999437, dom 0.9852\n");
    }

    if (want(5)) {
        EntangleSetup s;
        s.theta = 0.0;
        s.carrier = carrier4();
        s.link = link2();
        dump("5 entangle_master theta=0", entangle_master(s));
    }

    if (want(6)) {
        EntangleSetup s;
        s.theta = std::numbers::pi / 2.0;
        s.carrier = carrier4();
        s.link = link2();
        dump("6 entangle_master theta=pi/2", entangle_master(s));
    }

    if (want(7)) {
        TransferSetup s;
        s.carrier = carrier4();
        s.link = link2();
        const double f0 = transfer_master(s).metrics.at("fidelity");
        s.link.propagation_phase = 1.2345;
        const double f1 = transfer_master(s).metrics.at("fidelity");
        EntangleSetup e;
        e.carrier = carrier4();
        e.link = link2();
        const double g0 = entangle_master(e).metrics.at("fidelity");
        e.link.propagation_phase = -2.1;
        ProtocolResult ge = entangle_master(e);
        std::printf("== 7 phase invariance: transfer |dF| %.3e, entangle |dF| %.3e, "
                    "entangle phase_realized %.6f\n",
                    std::abs(f1 - f0), std::abs(ge.metrics.at("fidelity") - g0),
                    ge.metrics.at("phase_realized"));
    }

    if (want(8)) {
        const double gamma = SystemParams::standard().gamma;
        TimeGrid grid_b{100.0, 300.0, 4000};
        SwapSetup s;
        s.params = SystemParams::standard(2);
        s.stored = QubitAmplitudes::excited();
        s.outgoing = DesignTarget::sech(kGrid, 4.0 / gamma, 0.0, std::numbers::pi / 2.0);
        s.incoming = Wavepacket{};
        s.incoming.envelope = ComplexEnvelope(grid_b);
        dump("8a swap |e> + vacuum", swap_master(s));

        SwapSetup s2 = s;
        s2.stored = QubitAmplitudes::ground();
        s2.incoming = DesignTarget::sech(grid_b, 4.0 / gamma, 200.0, 0.0).shape;
        s2.incoming.mean_photon_number = 1.0;
        dump("8b swap |g> + photon", swap_master(s2));

        SwapSetup s3 = s2;
        s3.stored = QubitAmplitudes::excited();
        dump("8c swap |e> + photon", swap_master(s3));

        SwapSetup s4 = s2;
        s4.incoming.envelope.grid = TimeGrid{50.0, 250.0, 4000};
        bool threw = false;
        try {
            swap_master(s4);
        } catch (const ScheduleError&) {
            threw = true;
        }
        std::printf("== 8d overlapping schedule throws: %s\n", threw ? "yes" : "NO");
    }

    if (want(9)) {
        std::printf("== 9 leakage monotonicity (n_max=1)\n");
        for (int which = 0; which < 2; ++which) {
            double prev = -1.0;
            bool mono = true;
            for (int k = 0; k < 3; ++k) {
                TransferSetup s;
                s.carrier = carrier4();
                s.link = link2();
                s.link.node1 = SystemParams::from_energies(
                    0.1, 0.2, which == 0 ? 1e-4 : 0.5e-4 * (1 << k),
                    which == 0 ? 1.5e-3 * (1 << k) : 3e-3, 1.0, 1);
                s.link.node2 = s.link.node1;
                const double leak = transfer_master(s).metrics.at("p_leak");
                std::printf("   %s step %d: p_leak %.6f\n", which == 0 ? "Gamma" : "gamma0", k,
                            leak);
                if (leak < prev) mono = false;
                prev = leak;
            }
            std::printf("   monotone: %s\n", mono ? "yes" : "NO");
        }
    }

    if (want(10)) {
        TransferSetup s;
        s.carrier = carrier4();
        s.link = link2();
        const double fm = transfer_master(s).metrics.at("fidelity");
        TrajectoryOptions topts;
        topts.n_traj = 64;
        topts.seed = 7;
        ProtocolResult t1 = transfer_trajectories(s, topts);
        ProtocolResult t2 = transfer_trajectories(s, topts);
        bool identical = t1.metrics == t2.metrics && t1.stderrs == t2.stderrs;
        dump("10a transfer_trajectories N=64", t1);
        std::printf("   master F %.9f, pull %.2f sigma, deterministic rerun: %s\n", fm,
                    (t1.metrics.at("fidelity") - fm) / t1.stderrs.at("fidelity"),
                    identical ? "identical" : "DIFFERS");

        EntangleSetup e;
        e.carrier = carrier4();
        e.link = link2();
        const double gm = entangle_master(e).metrics.at("fidelity");
        ProtocolResult te = entangle_trajectories(e, topts);
        dump("10b entangle_trajectories N=64", te);
        std::printf("   master F %.9f, pull %.2f sigma\n", gm,
                    (te.metrics.at("fidelity") - gm) / te.stderrs.at("fidelity"));
    }

    if (want(11)) {
        TransferSetup s;
        s.carrier = carrier4();
        s.link = link2();
        TransferChannel chan = transfer_channel(s);
        double zeta = 0.0;
        const double fp = channel_fidelity(chan, QubitAmplitudes::equal(), &zeta);
        std::printf("== 11 channel: F(+) %.9f (zeta %.6f), F(g) %.9f, F(e) %.9f, "
                    "cardinal avg %.9f\n",
                    fp, zeta, channel_fidelity(chan, QubitAmplitudes::ground()),
                    channel_fidelity(chan, QubitAmplitudes::excited()),
                    cardinal_average_fidelity(chan));
        TransferSetup sm = s;
        const double direct = transfer_master(sm).metrics.at("fidelity");
        std::printf("   direct equal-input F %.9f, reconstruction diff %+.3e\n", direct,
                    fp - direct);
    }

    return 0;
}
