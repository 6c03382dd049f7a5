#include "raman/cascade.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "raman/errors.hpp"

namespace raman {

namespace {

constexpr cd kI{0.0, 1.0};

Trips scaled(Trips t, cd factor) { return scaled_trips(std::move(t), factor); }

std::vector<Trips> adjoint_all(const std::vector<Trips>& terms) {
    std::vector<Trips> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(adjoint_trips(t));
    return out;
}

SparseOp op_scaled(SparseOp op, cd factor) {
    for (auto& v : op.val) v *= factor;
    return op;
}

ComplexEnvelope shifted_by_steps(const ComplexEnvelope& env, int steps) {
    ComplexEnvelope out(env.grid);
    const int n = env.size();
    for (int i = 0; i < n; ++i) {
        const int j = i - steps;
        out.v[i] = (j >= 0 && j < n) ? env.v[j] : cd{0.0, 0.0};
    }
    return out;
}

}  // namespace

CascadeSystem build_cascade_system(const CascadeSpec& spec) {
    spec.node1.validate();
    spec.node2.validate();
    spec.opts1.validate();
    spec.opts2.validate();
    require_same_grid(spec.omega1.grid, spec.omega2.grid, "node drive envelopes");
    spec.omega1.check_finite("node 1 drive");
    spec.omega2.check_finite("node 2 drive");
    if (!std::isfinite(spec.propagation_phase) || !std::isfinite(spec.delay_ps))
        throw std::invalid_argument("propagation phase and channel delay must be finite");

    CascadeSystem sys;
    sys.spec = spec;
    sys.s1 = NodeSpace{spec.node1.n_max};
    sys.s2 = NodeSpace{spec.node2.n_max};
    const int d1 = sys.s1.dim();
    const int d2 = sys.s2.dim();
    sys.dim = d1 * d2;

    sys.om1 = edge_gated(spec.omega1, spec.opts1.edge_gate_steps);
    sys.om2 = edge_gated(spec.omega2, spec.opts2.edge_gate_steps);
    if (spec.delay_ps != 0.0) {
        const double dt = spec.omega1.grid.dt();
        const double s_real = spec.delay_ps / dt;
        const int s = static_cast<int>(std::lround(s_real));
        if (std::abs(s_real - s) > 1e-9)
            throw std::invalid_argument("channel delay must be an integer number of grid steps");
        sys.om2 = shifted_by_steps(sys.om2, s);
    }

    const NodeOps ops1(spec.node1, spec.opts1);
    const NodeOps ops2(spec.node2, spec.opts2);
    const NodeHamiltonianPieces p1 = node_hamiltonian_pieces(spec.node1, spec.opts1);
    const NodeHamiltonianPieces p2 = node_hamiltonian_pieces(spec.node2, spec.opts2);
    const Trips eye1 = identity_trips(d1);
    const Trips eye2 = identity_trips(d2);

    sys.h_base = kron_trips(p1.base, eye2, d2);
    for (const auto& e : kron_trips(eye1, p2.base, d2)) sys.h_base.push_back(e);

    // One-way channel: node 1's output drives node 2 but not the reverse,
    // which in the effective Hamiltonian is the single product -i L2^dag L1
    // = -i sqrt(gamma1 gamma2) e^{i phi} a2^dag a1. Together with the nodes'
    // own -gamma/2 photon-number damping this equals H_casc - (i/2) Lc^dag Lc
    // for the collective jump operator Lc below.
    const cd phase = std::exp(kI * spec.propagation_phase);
    const double g12 = std::sqrt(spec.node1.gamma * spec.node2.gamma);
    if (g12 > 0.0) {
        Trips cross = kron_trips(ops1.a, adjoint_trips(ops2.a), d2);
        for (const auto& e : scaled(std::move(cross), -kI * g12 * phase)) sys.h_base.push_back(e);
    }

    sys.h_terms.clear();
    for (const auto& t : p1.terms) sys.h_terms.push_back(kron_trips(t, eye2, d2));
    for (const auto& t : p2.terms) sys.h_terms.push_back(kron_trips(eye1, t, d2));
    sys.h_eff = TimeDependentOp::build(sys.dim, sys.h_base, sys.h_terms);
    sys.h_adj =
        TimeDependentOp::build(sys.dim, adjoint_trips(sys.h_base), adjoint_all(sys.h_terms));

    sys.plan.add_node(sys.om1, spec.node1.delta_zeeman, spec.opts1.include_offresonant);
    sys.plan.add_node(sys.om2, spec.node2.delta_zeeman, spec.opts2.include_offresonant);

    auto push_constant = [&](Trips t, const std::string& name) {
        sys.jumps.push_back(JumpOp::constant(SparseOp::from_triplets(sys.dim, sys.dim, t)));
        sys.jump_names.push_back(name);
    };

    if (spec.node1.gamma > 0.0 || spec.node2.gamma > 0.0) {
        Trips lc = scaled(kron_trips(ops1.a, eye2, d2), std::sqrt(spec.node1.gamma) * phase);
        for (const auto& e :
             scaled(kron_trips(eye1, ops2.a, d2), cd{std::sqrt(spec.node2.gamma), 0.0}))
            lc.push_back(e);
        push_constant(std::move(lc), "channel");
    }
    if (spec.node1.gamma0 > 0.0)
        push_constant(scaled(kron_trips(ops1.a, eye2, d2), cd{std::sqrt(spec.node1.gamma0), 0.0}),
                      "cavity_loss_1");
    if (spec.node2.gamma0 > 0.0)
        push_constant(scaled(kron_trips(eye1, ops2.a, d2), cd{std::sqrt(spec.node2.gamma0), 0.0}),
                      "cavity_loss_2");
    static const char* kSpNames[4] = {"t_to_g", "t_to_e", "tbar_to_e", "tbar_to_g"};
    if (spec.node1.Gamma_trion > 0.0)
        for (size_t k = 0; k < ops1.sp_jumps.size(); ++k)
            push_constant(kron_trips(ops1.sp_jumps[k], eye2, d2),
                          std::string("sp1_") + kSpNames[k]);
    if (spec.node2.Gamma_trion > 0.0)
        for (size_t k = 0; k < ops2.sp_jumps.size(); ++k)
            push_constant(kron_trips(eye1, ops2.sp_jumps[k], d2),
                          std::string("sp2_") + kSpNames[k]);
    return sys;
}

std::vector<JumpOp> node_jump_ops(const NodeSystem& sys) {
    std::vector<JumpOp> out;
    out.reserve(sys.flux_ops.size());
    for (const auto& op : sys.flux_ops) out.push_back(JumpOp::constant(op));
    return out;
}

std::vector<JumpOp> source_node_jump_ops(const SourceNodeSystem& sys) {
    std::vector<JumpOp> out;
    out.reserve(sys.flux_ops.size() + 1);
    out.push_back(JumpOp::driven(op_scaled(sys.a_joint, cd{sys.params.sqrt_gamma(), 0.0}),
                                 sys.b_op, sys.slot_kappa));
    for (const auto& op : sys.flux_ops) out.push_back(JumpOp::constant(op));
    return out;
}

// ---- deterministic master equation ----

namespace {

// Workspaces for one right-hand-side evaluation of the master equation.
struct MasterWork {
    MatrixXcd M, T, Tadj, T2;

    explicit MasterWork(int dim) : M(dim, dim), T(dim, dim), Tadj(dim, dim), T2(dim, dim) {}

    // Y = -i(H_eff X - X H_eff^dag) + sum_k L_k X L_k^dag. The first part is
    // M + M^dag with M = -i H_eff X (the -i is folded into vals at assembly),
    // the recycling part L X L^dag = (L (L X)^dag)^dag, so a Hermitian X
    // yields a Hermitian Y up to rounding.
    void rhs(const TimeDependentOp& h, const std::vector<cd>& vals,
             const std::vector<JumpOp>& jumps, const std::vector<cd>& coeffs, const MatrixXcd& X,
             MatrixXcd& Y) {
        const int dim = h.dim;
        h.apply_mat(vals, X.data(), M.data(), dim);
        Y = M + M.adjoint();
        for (const auto& j : jumps) {
            j.apply(X.data(), T.data(), coeffs.data(), dim);
            Tadj = T.adjoint();
            j.apply(Tadj.data(), T2.data(), coeffs.data(), dim);
            Y += T2.adjoint();
        }
    }
};

}  // namespace

MasterRun master_equation(const TimeDependentOp& h, const CoeffPlan& plan,
                          const std::vector<JumpOp>& jumps, const MatrixXcd& rho0,
                          const TimeGrid& grid, const MasterOptions& opts) {
    const int dim = h.dim;
    if (rho0.rows() != dim || rho0.cols() != dim)
        throw std::invalid_argument("master_equation: initial state has wrong dimension");
    for (const auto& j : jumps) {
        if (j.fixed.rows != dim || j.fixed.cols != dim)
            throw std::invalid_argument("master_equation: jump operator has wrong dimension");
        if (j.has_scaled && (j.coeff_slot < 0 || j.coeff_slot >= plan.n_slots()))
            throw std::invalid_argument("master_equation: jump coefficient slot out of range");
    }

    const int n = grid.n_steps;
    const double dt = grid.dt();
    const double trace0 = rho0.trace().real();
    const double scale = std::max(std::abs(trace0), 1e-12);

    MasterRun run;
    run.grid = grid;

    std::vector<cd> c0(plan.n_slots()), cm(plan.n_slots()), c1(plan.n_slots());
    std::vector<cd> v0, vm, v1;
    MatrixXcd rho = rho0;
    MatrixXcd K1(dim, dim), K2(dim, dim), K3(dim, dim), K4(dim, dim), tmp(dim, dim);
    MasterWork work(dim);
    bool have_eig = false;

    auto checkpoint = [&](int step) {
        const double herm = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
        if (herm > 1e-10 * scale)
            throw IntegrationError("master_equation: Hermiticity defect " + std::to_string(herm) +
                                   " at step " + std::to_string(step));
        const double drift = std::abs(rho.trace() - cd{trace0, 0.0});
        if (drift > opts.trace_tol * scale)
            throw IntegrationError("master_equation: trace drift " + std::to_string(drift) +
                                   " at step " + std::to_string(step));
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        const double lam = es.eigenvalues().minCoeff();
        if (!have_eig || lam < run.min_eigenvalue) run.min_eigenvalue = lam;
        have_eig = true;
        if (lam < -opts.positivity_tol * scale)
            throw IntegrationError("master_equation: negative eigenvalue " + std::to_string(lam) +
                                   " at step " + std::to_string(step));
    };

    if (opts.observer && opts.observe_every > 0) opts.observer(0, rho);

    for (int i = 0; i < n; ++i) {
        const double t0 = grid.time(i);
        plan.fill(i, 0, t0, c0.data());
        plan.fill(i, 1, t0 + 0.5 * dt, cm.data());
        plan.fill(i, 2, t0 + dt, c1.data());
        h.assemble(c0.data(), -kI, v0);
        h.assemble(cm.data(), -kI, vm);
        h.assemble(c1.data(), -kI, v1);

        work.rhs(h, v0, jumps, c0, rho, K1);
        tmp = rho + (0.5 * dt) * K1;
        work.rhs(h, vm, jumps, cm, tmp, K2);
        tmp = rho + (0.5 * dt) * K2;
        work.rhs(h, vm, jumps, cm, tmp, K3);
        tmp = rho + dt * K3;
        work.rhs(h, v1, jumps, c1, tmp, K4);
        rho += (dt / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
        // Project out the rounding-level asymmetry so it cannot accumulate.
        tmp = 0.5 * (rho + rho.adjoint().eval());
        rho.swap(tmp);

        const int step = i + 1;
        if (opts.checkpoint_every > 0 && (step % opts.checkpoint_every == 0 || step == n))
            checkpoint(step);
        if (opts.observer && opts.observe_every > 0 &&
            (step % opts.observe_every == 0 || step == n))
            opts.observer(step, rho);
    }

    run.rho_final = std::move(rho);
    run.trace_defect = std::abs(run.rho_final.trace() - cd{trace0, 0.0});
    return run;
}

// ---- Monte Carlo trajectories ----

namespace {

struct StageCoeffs {
    std::vector<cd> c;
    std::vector<cd> v;
};

// One RK4 substep of the no-jump equation over [t, t + hstep], with
// coefficients interpolated inside grid interval i (frac is relative to the
// full interval).
void substep(const TimeDependentOp& h, const CoeffPlan& plan, int i, double t_i, double dt,
             double frac_from, double frac_to, VectorXcd& psi, StageCoeffs& s0, StageCoeffs& sm,
             StageCoeffs& s1, VectorXcd& k1, VectorXcd& k2, VectorXcd& k3, VectorXcd& k4,
             VectorXcd& tmp) {
    const double hstep = (frac_to - frac_from) * dt;
    const double fm = 0.5 * (frac_from + frac_to);
    plan.fill_interp(i, frac_from, t_i + frac_from * dt, s0.c.data());
    plan.fill_interp(i, fm, t_i + fm * dt, sm.c.data());
    plan.fill_interp(i, frac_to, t_i + frac_to * dt, s1.c.data());
    h.assemble(s0.c.data(), -kI, s0.v);
    h.assemble(sm.c.data(), -kI, sm.v);
    h.assemble(s1.c.data(), -kI, s1.v);
    h.apply(s0.v, psi.data(), k1.data());
    tmp = psi + (0.5 * hstep) * k1;
    h.apply(sm.v, tmp.data(), k2.data());
    tmp = psi + (0.5 * hstep) * k2;
    h.apply(sm.v, tmp.data(), k3.data());
    tmp = psi + hstep * k3;
    h.apply(s1.v, tmp.data(), k4.data());
    psi += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

TrajectoryRun trajectories(const TimeDependentOp& h, const CoeffPlan& plan,
                           const std::vector<JumpOp>& jumps, const VectorXcd& psi0,
                           const TimeGrid& grid, const TrajectoryOptions& opts) {
    const int dim = h.dim;
    if (psi0.size() != dim)
        throw std::invalid_argument("trajectories: initial state has wrong dimension");
    if (std::abs(psi0.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("trajectories: initial state must be normalized");
    if (opts.n_traj < 1) throw std::invalid_argument("trajectories: n_traj must be >= 1");
    if (jumps.empty()) throw std::invalid_argument("trajectories: jump list is empty");

    const int N = opts.n_traj;
    const int n = grid.n_steps;
    const double dt = grid.dt();
    const int n_chan = static_cast<int>(jumps.size());

    TrajectoryRun run;
    run.grid = grid;
    run.n_traj = N;
    run.seed = opts.seed;
    run.jumps.assign(N, {});

    // Each trajectory owns an independent generator derived from (seed, k),
    // so results do not depend on how the batch is laid out.
    std::vector<std::mt19937_64> eng;
    eng.reserve(N);
    // SplitMix64 stream seeded at opts.seed: state k is seed + (k+1) * gamma,
    // so ensembles from different seeds never share a trajectory stream.
    for (int k = 0; k < N; ++k)
        eng.emplace_back(splitmix64(opts.seed + std::uint64_t(k) * 0x9e3779b97f4a7c15ULL));
    auto uniform = [](std::mt19937_64& e) { return double(e() >> 11) * 0x1.0p-53; };
    auto threshold = [&](std::mt19937_64& e) {
        double r = uniform(e);
        while (r <= 0.0 || r >= 1.0) r = uniform(e);
        return r;
    };

    MatrixXcd Psi(dim, N), Prev(dim, N), K1(dim, N), K2(dim, N), K3(dim, N), K4(dim, N),
        Tmp(dim, N);
    for (int k = 0; k < N; ++k) Psi.col(k) = psi0;
    std::vector<double> thresh(N);
    for (int k = 0; k < N; ++k) thresh[k] = threshold(eng[k]);

    std::vector<cd> c0(plan.n_slots()), cm(plan.n_slots()), c1(plan.n_slots());
    std::vector<cd> v0, vm, v1;
    StageCoeffs s0{std::vector<cd>(plan.n_slots()), {}}, sm{std::vector<cd>(plan.n_slots()), {}},
        s1{std::vector<cd>(plan.n_slots()), {}};
    VectorXcd psi(dim), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), lpsi(dim);
    std::vector<cd> cstar(plan.n_slots());
    std::vector<double> flux(n_chan);

    for (int i = 0; i < n; ++i) {
        const double t_i = grid.time(i);
        plan.fill(i, 0, t_i, c0.data());
        plan.fill(i, 1, t_i + 0.5 * dt, cm.data());
        plan.fill(i, 2, t_i + dt, c1.data());
        h.assemble(c0.data(), -kI, v0);
        h.assemble(cm.data(), -kI, vm);
        h.assemble(c1.data(), -kI, v1);

        Prev = Psi;
        h.apply_mat(v0, Psi.data(), K1.data(), N);
        Tmp = Psi + (0.5 * dt) * K1;
        h.apply_mat(vm, Tmp.data(), K2.data(), N);
        Tmp = Psi + (0.5 * dt) * K2;
        h.apply_mat(vm, Tmp.data(), K3.data(), N);
        Tmp = Psi + dt * K3;
        h.apply_mat(v1, Tmp.data(), K4.data(), N);
        Psi += (dt / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);

        for (int k = 0; k < N; ++k) {
            double n2_end = Psi.col(k).squaredNorm();
            if (n2_end >= thresh[k]) continue;

            // The norm crossed this trajectory's waiting-time threshold
            // inside [t_i, t_i + dt]. Walk forward from the saved state,
            // locating each crossing by exponential interpolation.
            psi = Prev.col(k);
            double frac0 = 0.0;
            double n2_0 = psi.squaredNorm();
            int iter = 0;
            while (n2_end < thresh[k]) {
                if (++iter > opts.max_jumps_per_step)
                    throw IntegrationError("trajectories: too many jumps in one step");
                const double r = thresh[k];
                double x = 0.0;
                if (n2_0 > r && n2_end > 0.0 && n2_end < n2_0)
                    x = std::log(n2_0 / r) / std::log(n2_0 / n2_end);
                x = std::min(std::max(x, 0.0), 1.0);
                const double frac_star = frac0 + (1.0 - frac0) * x;
                substep(h, plan, i, t_i, dt, frac0, frac_star, psi, s0, sm, s1, k1, k2, k3, k4,
                        tmp);

                const double t_star = t_i + frac_star * dt;
                plan.fill_interp(i, frac_star, t_star, cstar.data());
                double total = 0.0;
                for (int c = 0; c < n_chan; ++c) {
                    jumps[c].apply(psi.data(), lpsi.data(), cstar.data());
                    flux[c] = lpsi.squaredNorm();
                    total += flux[c];
                }
                if (!(total > 0.0))
                    throw IntegrationError("trajectories: vanishing jump flux at crossing");
                double u = uniform(eng[k]) * total;
                int chan = n_chan - 1;
                for (int c = 0; c < n_chan; ++c) {
                    if (u < flux[c]) {
                        chan = c;
                        break;
                    }
                    u -= flux[c];
                }
                jumps[chan].apply(psi.data(), lpsi.data(), cstar.data());
                psi = lpsi / lpsi.norm();
                run.jumps[k].push_back({t_star, chan});
                thresh[k] = threshold(eng[k]);

                substep(h, plan, i, t_i, dt, frac_star, 1.0, psi, s0, sm, s1, k1, k2, k3, k4,
                        tmp);
                frac0 = frac_star;
                n2_0 = 1.0;
                n2_end = psi.squaredNorm();
            }
            Psi.col(k) = psi;
        }
    }

    run.finals.resize(dim, N);
    for (int k = 0; k < N; ++k) {
        const double nrm = Psi.col(k).norm();
        if (!(nrm > 0.0)) throw IntegrationError("trajectories: trajectory norm vanished");
        run.finals.col(k) = Psi.col(k) / nrm;
    }
    run.rho_mean = (run.finals * run.finals.adjoint()) / double(N);
    return run;
}

MasterRun cascade_master(const CascadeSystem& sys, const VectorXcd& psi0, const TimeGrid& grid,
                         const MasterOptions& opts) {
    require_same_grid(grid, sys.om1.grid, "evolution grid vs cascade drives");
    if (psi0.size() != sys.dim)
        throw std::invalid_argument("cascade_master: initial state has wrong dimension");
    const MatrixXcd rho0 = psi0 * psi0.adjoint();
    return master_equation(sys.h_eff, sys.plan, sys.jumps, rho0, grid, opts);
}

TrajectoryRun cascade_trajectories(const CascadeSystem& sys, const VectorXcd& psi0,
                                   const TimeGrid& grid, const TrajectoryOptions& opts) {
    require_same_grid(grid, sys.om1.grid, "evolution grid vs cascade drives");
    return trajectories(sys.h_eff, sys.plan, sys.jumps, psi0, grid, opts);
}

}  // namespace raman
