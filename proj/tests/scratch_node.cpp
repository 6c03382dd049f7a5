// Dev scratch: validates the full-node model against the reduced chain and
// probes the paper-scale loss budget. Not part of the build.
#include <cstdio>
#include <cmath>

#include "raman/designer.hpp"
#include "raman/node_model.hpp"
#include "raman/reduced.hpp"

using namespace raman;

static int pathway_parity(const NodeSpace& s, int idx) {
    const Level l = s.level_of(idx);
    const int grp = (l == Level::e || l == Level::t) ? 1 : 0;
    return grp ^ (s.photons_of(idx) % 2);
}

int main() {
    const TimeGrid grid(-150.0, 150.0, 6000);
    const double theta = M_PI / 2.0;
    const DesignTarget target = DesignTarget::sech(grid, 6.0 / 0.303853, 0.0, theta);
    const SystemParams params = SystemParams::standard(3);

    // 1. structure: parity conservation + non-Hermitian part is damping only
    {
        MatrixXcd h = node_h_dense(params, NodeModelOptions{}, cd{0.31, -0.12}, 7.3);
        const NodeSpace s(params.n_max);
        double offblock = 0.0;
        for (int i = 0; i < s.dim(); ++i)
            for (int j = 0; j < s.dim(); ++j)
                if (pathway_parity(s, i) != pathway_parity(s, j))
                    offblock = std::max(offblock, std::abs(h(i, j)));
        MatrixXcd antih = h - h.adjoint();
        // the anti-Hermitian part should be -i * diag(rates)
        double offdiag = 0.0;
        for (int i = 0; i < s.dim(); ++i)
            for (int j = 0; j < s.dim(); ++j)
                if (i != j) offdiag = std::max(offdiag, std::abs(antih(i, j)));
        std::printf("structure: parity offblock %.3e, antiherm offdiag %.3e\n", offblock, offdiag);
    }

    DesignResult des = design_send_pulse(target, params);

    // 2. reduced limit: offresonant off, Gamma = 0, gamma0 = 0
    {
        SystemParams p0 = params;
        p0.Gamma_trion = 0.0;
        p0.gamma0 = 0.0;
        NodeModelOptions opts;
        opts.include_offresonant = false;
        opts.edge_gate_steps = 0;
        SendOutcome full = send_full(QubitAmplitudes::excited(), des.omega, p0, opts);
        ReducedRun red = integrate_reduced(des.omega, nullptr, ReducedState{cd{1.0}, {}, {}}, p0);
        double dmax = 0.0;
        for (int i = 0; i <= grid.n_steps; ++i)
            dmax = std::max(dmax, std::abs(full.one_photon.v[i] - red.alpha_out_raw.v[i]));
        std::printf("reduced limit: max|one_photon - alpha_out| = %.3e, p_one %.12f vs %.12f\n",
                    dmax, full.p_one, red.photon_number);
        std::printf("  full p_error %.3e amp_vac %.3e\n", full.p_error, std::abs(full.amp_vacuum));
    }

    // 3. paper-scale send from |e>: loss budget
    {
        SendOutcome full = send_full(QubitAmplitudes::excited(), des.omega, params,
                                     NodeModelOptions{}, &target);
        std::printf("send(e): p_one %.6f p_err %.4e sp %.4e g0 %.4e offres %.4e multi %.4e resid %.4e\n",
                    full.p_one, full.p_error, full.p_spontaneous, full.p_intrinsic,
                    full.p_error_offresonant, full.p_multi, full.p_residual);
        std::printf("send(e): pulse_fidelity %.6f trunc %.3e\n", full.pulse_fidelity,
                    full.truncation_weight);
    }

    // 4. equal superposition: overall fidelity + ground phase
    {
        SendOutcome full = send_full(QubitAmplitudes::equal(), des.omega, params,
                                     NodeModelOptions{}, &target);
        PhaseDriftResult drift = extract_phase_drift(des.omega, params);
        std::printf("send(equal): overall %.6f phi_g %.6f drift phi %.6f (gnorm %.6f)\n",
                    full.overall_fidelity, full.phi_g, drift.phi_final, drift.ground_norm);

        // 5. receive the emitted packet with a pulse designed from it
        DesignResult rdes = design_receive_pulse(full.packet, params);
        ProtocolResult rec = receive_full(full.packet, rdes.omega, params);
        std::printf("receive: fid %.6f absorb %.6f refl %.4e sp %.4e resid %.4e perr %.4e\n",
                    rec.metrics.at("fidelity"), rec.metrics.at("absorption"),
                    rec.metrics.at("reflection"), rec.metrics.at("p_spontaneous"),
                    rec.metrics.at("source_residual"), rec.metrics.at("p_error"));
        std::printf("receive: phi_e %.6f phi_g %.6f A_e %.6f\n", rec.metrics.at("phi_e"),
                    rec.metrics.at("phi_g"), std::abs(rec.amplitudes.at("A_e")));
        const double closure = std::norm(rec.amplitudes.at("A_g")) +
                               std::norm(rec.amplitudes.at("A_e")) + rec.metrics.at("reflection") +
                               rec.metrics.at("p_spontaneous") + rec.metrics.at("p_intrinsic") +
                               rec.metrics.at("source_residual");
        std::printf("receive: budget closure 1-sum = %.3e\n", 1.0 - closure);
    }

    // 6. convergence in n_max for the send
    {
        SendOutcome f3 = send_full(QubitAmplitudes::excited(), des.omega, params,
                                   NodeModelOptions{}, &target);
        SystemParams p4 = params;
        p4.n_max = 4;
        SendOutcome f4 = send_full(QubitAmplitudes::excited(), des.omega, p4,
                                   NodeModelOptions{}, &target);
        std::printf("n_max 3->4: dp_one %.3e dfid %.3e\n", std::abs(f3.p_one - f4.p_one),
                    std::abs(f3.pulse_fidelity - f4.pulse_fidelity));
    }
    return 0;
}
