// Development driver for the two-node cascade engine. Checks, in order:
//  1) trivial invariance (no drive, ground states)
//  2) decoupled-node analytic decay + trajectory jump statistics
//  3) unidirectionality of the channel
//  4) state transfer numbers (sech carrier, width 4/gamma)
//  5) remote entanglement numbers (theta = pi/4)
//  6) trajectories vs master equation
//  7) lossless reduced limit
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "raman/cascade.hpp"
#include "raman/designer.hpp"
#include "raman/hilbert.hpp"
#include "raman/node_model.hpp"
#include "raman/params.hpp"
#include "raman/shapes.hpp"

using namespace raman;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    static const auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

struct QubitBlock {
    double p_gg, p_ge, p_eg, p_ee;
    cd cross;            // <g1 e2| rho |e1 g2>
    MatrixXcd block;     // 4x4 over (l1, l2) in {g,e}^2, zero photons
};

QubitBlock qubit_block(const CascadeSystem& sys, const MatrixXcd& rho) {
    QubitBlock out{};
    const Level ls[2] = {Level::g, Level::e};
    std::vector<int> id;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) id.push_back(sys.index(ls[i], 0, ls[j], 0));
    out.block.resize(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out.block(r, c) = rho(id[r], id[c]);
    out.p_gg = out.block(0, 0).real();
    out.p_ge = out.block(1, 1).real();
    out.p_eg = out.block(2, 2).real();
    out.p_ee = out.block(3, 3).real();
    out.cross = out.block(1, 2);
    return out;
}

}  // namespace

int main() {
    const double gamma = SystemParams::standard().gamma;

    // ---- part 1: no drive, ground states stay put ----
    {
        TimeGrid grid{-10.0, 10.0, 400};
        CascadeSpec spec;
        spec.node1 = SystemParams::standard(2);
        spec.node2 = SystemParams::standard(2);
        spec.omega1 = ComplexEnvelope(grid);
        spec.omega2 = ComplexEnvelope(grid);
        CascadeSystem sys = build_cascade_system(spec);
        VectorXcd psi0 = VectorXcd::Zero(sys.dim);
        psi0(sys.index(Level::g, 0, Level::g, 0)) = 1.0;
        MasterRun mr = cascade_master(sys, psi0, grid);
        const double p = mr.rho_final(sys.index(Level::g, 0, Level::g, 0),
                                      sys.index(Level::g, 0, Level::g, 0)).real();
        TrajectoryOptions topt;
        topt.n_traj = 8;
        topt.seed = 7;
        TrajectoryRun tr = cascade_trajectories(sys, psi0, grid, topt);
        int total_jumps = 0;
        for (const auto& j : tr.jumps) total_jumps += static_cast<int>(j.size());
        double max_dev = 0.0;
        for (int k = 0; k < tr.n_traj; ++k)
            max_dev = std::max(max_dev, (tr.finals.col(k) - psi0).norm());
        std::printf("p1 trivial: |p_gg-1| %.3e trace_defect %.3e min_eig %.3e jumps %d traj_dev %.3e [%.1fs]\n",
                    std::abs(p - 1.0), mr.trace_defect, mr.min_eigenvalue, total_jumps, max_dev,
                    now_s());
    }

    // ---- part 2: decoupled node, analytic photon decay ----
    {
        TimeGrid grid{0.0, 20.0, 800};
        CascadeSpec spec;
        spec.node1 = SystemParams::standard(2);
        spec.node1.g_cav = 0.0;
        spec.node1.gamma0 = 0.0;
        spec.node1.Gamma_trion = 0.0;
        spec.node2 = spec.node1;
        spec.node2.gamma = 0.0;  // node 2 sees nothing
        spec.omega1 = ComplexEnvelope(grid);
        spec.omega2 = ComplexEnvelope(grid);
        CascadeSystem sys = build_cascade_system(spec);
        VectorXcd psi0 = VectorXcd::Zero(sys.dim);
        psi0(sys.index(Level::g, 1, Level::g, 0)) = 1.0;
        MasterRun mr = cascade_master(sys, psi0, grid);
        const double p1 = mr.rho_final(sys.index(Level::g, 1, Level::g, 0),
                                       sys.index(Level::g, 1, Level::g, 0)).real();
        const double p0 = mr.rho_final(sys.index(Level::g, 0, Level::g, 0),
                                       sys.index(Level::g, 0, Level::g, 0)).real();
        const double exact = std::exp(-gamma * 20.0);
        std::printf("p2 decay: |p1 - exp| %.3e |p0 - (1-exp)| %.3e (exp %.6f)\n",
                    std::abs(p1 - exact), std::abs(p0 - (1.0 - exact)), exact);

        TrajectoryOptions topt;
        topt.n_traj = 400;
        topt.seed = 12345;
        TrajectoryRun tr = cascade_trajectories(sys, psi0, grid, topt);
        int n_jumped = 0, n_multi = 0, bad_chan = 0;
        double mean_t = 0.0;
        for (const auto& recs : tr.jumps) {
            if (recs.size() > 1) ++n_multi;
            if (!recs.empty()) {
                ++n_jumped;
                mean_t += recs[0].t;
                if (recs[0].channel != 0) ++bad_chan;
            }
        }
        mean_t /= std::max(n_jumped, 1);
        const double p_jump = 1.0 - std::exp(-gamma * 20.0);
        const double se_frac = std::sqrt(p_jump * (1.0 - p_jump) / topt.n_traj);
        // mean jump time of a truncated exponential on [0, T]
        const double T = 20.0;
        const double mean_exact =
            1.0 / gamma - T * std::exp(-gamma * T) / (1.0 - std::exp(-gamma * T));
        std::printf(
            "p2 traj: frac %.4f vs %.4f (3se %.4f) mean_t %.3f vs %.3f multi %d badchan %d [%.1fs]\n",
            double(n_jumped) / topt.n_traj, p_jump, 3.0 * se_frac, mean_t, mean_exact, n_multi,
            bad_chan, now_s());
    }

    // ---- part 3: node 2 cannot influence node 1 ----
    {
        TimeGrid grid{-30.0, 30.0, 1200};
        ComplexEnvelope om1 = ComplexEnvelope::sample(
            grid, [](double t) { return cd{0.2 * std::exp(-t * t / 50.0), 0.0}; });
        ComplexEnvelope om2 = ComplexEnvelope::sample(
            grid, [](double t) { return cd{0.3 * std::exp(-(t - 5.0) * (t - 5.0) / 30.0), 0.1}; });
        CascadeSpec spec;
        spec.node1 = SystemParams::standard(2);
        spec.node2 = SystemParams::standard(2);
        spec.omega1 = om1;
        spec.omega2 = om2;
        spec.propagation_phase = 0.7;
        CascadeSystem sys = build_cascade_system(spec);
        const int d1 = sys.s1.dim(), d2 = sys.s2.dim();

        auto run_rho1 = [&](Level l2_init, const ComplexEnvelope& drive2) {
            CascadeSpec s = spec;
            s.omega2 = drive2;
            CascadeSystem cs = build_cascade_system(s);
            VectorXcd psi0 = VectorXcd::Zero(cs.dim);
            psi0(cs.index(Level::e, 0, l2_init, 0)) = 1.0;
            MasterRun mr = cascade_master(cs, psi0, grid);
            return partial_trace(mr.rho_final, d1, d2, 1);
        };
        MatrixXcd r1a = run_rho1(Level::g, om2);
        MatrixXcd r1b = run_rho1(Level::e, om2);
        MatrixXcd r1c = run_rho1(Level::g, ComplexEnvelope(grid));
        const double dev_init = (r1a - r1b).cwiseAbs().maxCoeff();
        const double dev_drive = (r1a - r1c).cwiseAbs().maxCoeff();

        // and node 1 does influence node 2
        auto run_rho2 = [&](Level l1_init) {
            VectorXcd psi0 = VectorXcd::Zero(sys.dim);
            psi0(sys.index(l1_init, 0, Level::g, 0)) = 1.0;
            MasterRun mr = cascade_master(sys, psi0, grid);
            return partial_trace(mr.rho_final, d1, d2, 2);
        };
        const double dev_fwd = (run_rho2(Level::e) - run_rho2(Level::g)).cwiseAbs().maxCoeff();
        std::printf("p3 one-way: back(init) %.3e back(drive) %.3e forward %.3e [%.1fs]\n",
                    dev_init, dev_drive, dev_fwd, now_s());
    }

    // ---- part 4: state transfer, sech width 4/gamma ----
    const double w4 = 4.0 / gamma;
    TimeGrid tgrid{-100.0, 100.0, 4000};
    {
        SystemParams p = SystemParams::standard(2);
        DesignTarget target = DesignTarget::sech(tgrid, w4, 0.0, M_PI / 2.0);
        DesignResult send = design_send_pulse(target, p);
        DesignResult recv = design_receive_pulse(target, p);
        CascadeSpec spec;
        spec.node1 = p;
        spec.node2 = p;
        spec.omega1 = send.omega;
        spec.omega2 = recv.omega;
        CascadeSystem sys = build_cascade_system(spec);
        VectorXcd psi0 = VectorXcd::Zero(sys.dim);
        psi0(sys.index(Level::g, 0, Level::g, 0)) = 1.0 / std::sqrt(2.0);
        psi0(sys.index(Level::e, 0, Level::g, 0)) = 1.0 / std::sqrt(2.0);
        MasterRun mr = cascade_master(sys, psi0, tgrid);
        MatrixXcd rho2 = partial_trace(mr.rho_final, sys.s1.dim(), sys.s2.dim(), 2);
        const int ig = sys.s2.index(Level::g, 0), ie = sys.s2.index(Level::e, 0);
        const double rgg = rho2(ig, ig).real(), ree = rho2(ie, ie).real();
        const double rge = std::abs(rho2(ig, ie));
        const double F = 0.5 * rgg + 0.5 * ree + rge;
        MatrixXcd rho1 = partial_trace(mr.rho_final, sys.s1.dim(), sys.s2.dim(), 1);
        const double resid1 = 1.0 - rho1(sys.s1.index(Level::g, 0), sys.s1.index(Level::g, 0)).real();
        std::printf(
            "p4 transfer: F %.6f rgg %.6f ree %.6f |rge| %.6f node1_resid %.3e mineig %.2e [%.1fs]\n",
            F, rgg, ree, rge, resid1, mr.min_eigenvalue, now_s());
    }

    // ---- part 5: remote entanglement, theta = pi/4 ----
    for (double w : {w4, 6.0 / gamma}) {
        TimeGrid egrid = (w > w4) ? TimeGrid{-150.0, 150.0, 6000} : tgrid;
        SystemParams p = SystemParams::standard(2);
        DesignTarget half = DesignTarget::sech(egrid, w, 0.0, M_PI / 4.0);
        DesignTarget full = DesignTarget::sech(egrid, w, 0.0, M_PI / 2.0);
        DesignResult send = design_send_pulse(half, p);
        DesignResult recv = design_receive_pulse(full, p);
        CascadeSpec spec;
        spec.node1 = p;
        spec.node2 = p;
        spec.omega1 = send.omega;
        spec.omega2 = recv.omega;
        CascadeSystem sys = build_cascade_system(spec);
        VectorXcd psi0 = VectorXcd::Zero(sys.dim);
        psi0(sys.index(Level::e, 0, Level::g, 0)) = 1.0;
        MasterRun mr = cascade_master(sys, psi0, egrid);
        QubitBlock qb = qubit_block(sys, mr.rho_final);
        const double amp_ge = std::sqrt(qb.p_ge), amp_eg = std::sqrt(qb.p_eg);
        const double p_leak = 1.0 - qb.p_ge - qb.p_eg;
        const double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
        const double F =
            std::sqrt(c * c * qb.p_eg + s * s * qb.p_ge + 2.0 * c * s * std::abs(qb.cross));
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(qb.block);
        VectorXcd v = es.eigenvectors().col(3);
        MatrixXcd pure = v * v.adjoint();
        const double S = von_neumann_entropy(partial_trace(pure, 2, 2, 1));
        std::printf(
            "p5 entangle w=%.2f: amp_ge %.4f amp_eg %.4f leak %.4f F %.6f S %.6f cross %.6f dom %.4f [%.1fs]\n",
            w, amp_ge, amp_eg, p_leak, F, S, std::abs(qb.cross),
            es.eigenvalues()(3) / (qb.p_gg + qb.p_ge + qb.p_eg + qb.p_ee), now_s());
    }

    // ---- part 6: trajectories agree with the master equation ----
    {
        SystemParams p = SystemParams::standard(2);
        DesignTarget target = DesignTarget::sech(tgrid, w4, 0.0, M_PI / 2.0);
        DesignResult send = design_send_pulse(target, p);
        DesignResult recv = design_receive_pulse(target, p);
        CascadeSpec spec;
        spec.node1 = p;
        spec.node2 = p;
        spec.omega1 = send.omega;
        spec.omega2 = recv.omega;
        CascadeSystem sys = build_cascade_system(spec);
        VectorXcd psi0 = VectorXcd::Zero(sys.dim);
        psi0(sys.index(Level::e, 0, Level::g, 0)) = 1.0;
        MasterRun mr = cascade_master(sys, psi0, tgrid);
        TrajectoryOptions topt;
        topt.n_traj = 200;
        topt.seed = 99;
        TrajectoryRun tr = cascade_trajectories(sys, psi0, tgrid, topt);
        const int iee = sys.index(Level::e, 0, Level::g, 0);
        const int ige = sys.index(Level::g, 0, Level::e, 0);
        const int igg = sys.index(Level::g, 0, Level::g, 0);
        int total_jumps = 0;
        for (const auto& r : tr.jumps) total_jumps += static_cast<int>(r.size());
        for (int idx : {ige, igg, iee}) {
            const double pm = mr.rho_final(idx, idx).real();
            const double pt = tr.rho_mean(idx, idx).real();
            const double se = std::sqrt(std::max(pm * (1.0 - pm), 1e-12) / topt.n_traj);
            std::printf("p6 traj idx %d: ME %.4f traj %.4f dev/se %.2f\n", idx, pm, pt,
                        std::abs(pt - pm) / se);
        }
        std::printf("p6 jumps total %d (%.2f per traj) [%.1fs]\n", total_jumps,
                    double(total_jumps) / topt.n_traj, now_s());
    }

    // ---- part 7: lossless resonant limit ----
    {
        SystemParams p = SystemParams::standard(2);
        p.gamma0 = 0.0;
        p.Gamma_trion = 0.0;
        NodeModelOptions nopts;
        nopts.include_offresonant = false;
        DesignTarget target = DesignTarget::sech(tgrid, w4, 0.0, M_PI / 2.0);
        DesignResult send = design_send_pulse(target, p);
        DesignResult recv = design_receive_pulse(target, p);
        CascadeSpec spec;
        spec.node1 = p;
        spec.node2 = p;
        spec.omega1 = send.omega;
        spec.omega2 = recv.omega;
        spec.opts1 = nopts;
        spec.opts2 = nopts;
        CascadeSystem sys = build_cascade_system(spec);
        VectorXcd psi0 = VectorXcd::Zero(sys.dim);
        psi0(sys.index(Level::g, 0, Level::g, 0)) = 1.0 / std::sqrt(2.0);
        psi0(sys.index(Level::e, 0, Level::g, 0)) = 1.0 / std::sqrt(2.0);
        MasterRun mr = cascade_master(sys, psi0, tgrid);
        MatrixXcd rho2 = partial_trace(mr.rho_final, sys.s1.dim(), sys.s2.dim(), 2);
        const int ig = sys.s2.index(Level::g, 0), ie = sys.s2.index(Level::e, 0);
        const double F = 0.5 * rho2(ig, ig).real() + 0.5 * rho2(ie, ie).real() +
                         std::abs(rho2(ig, ie));
        std::printf("p7 lossless: F %.8f (1-F %.3e) [%.1fs]\n", F, 1.0 - F, now_s());
    }
    return 0;
}
