#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "raman/grid.hpp"
#include "raman/hilbert.hpp"
#include "raman/node_model.hpp"
#include "raman/params.hpp"
#include "raman/sparse.hpp"

namespace raman {

// Lindblad jump operator, optionally with a drive-scaled part:
// L(t) = fixed + coeff(t) * scaled, the coefficient read from a CoeffPlan
// slot (used for the virtual-source collective channel kappa(t) b + sqrt(g) a).
struct JumpOp {
    SparseOp fixed;
    SparseOp scaled;
    bool has_scaled = false;
    int coeff_slot = -1;

    static JumpOp constant(SparseOp op) {
        JumpOp j;
        j.fixed = std::move(op);
        return j;
    }
    static JumpOp driven(SparseOp fixed_part, SparseOp scaled_part, int slot) {
        JumpOp j;
        j.fixed = std::move(fixed_part);
        j.scaled = std::move(scaled_part);
        j.has_scaled = true;
        j.coeff_slot = slot;
        return j;
    }

    // y = L(t) x with the coefficient array the CoeffPlan filled for time t.
    void apply(const cd* x, cd* y, const cd* coeffs) const {
        fixed.apply(x, y);
        if (has_scaled) scaled.apply_add(x, y, coeffs[coeff_slot]);
    }

    // Y = L(t) X for col-major X, Y with m columns.
    void apply(const cd* x, cd* y, const cd* coeffs, int m) const {
        fixed.apply_mat(x, y, m);
        if (has_scaled) scaled.apply_mat_add(x, y, coeffs[coeff_slot], m);
    }
};

// Two nodes coupled through a one-way channel: node 1's output feeds node
// 2's input. The channel adds the collective jump operator
// L_c = sqrt(gamma1) e^{i phi} a1 + sqrt(gamma2) a2 and the unidirectional
// coupling -i L2^dag L1 in the effective Hamiltonian. delay_ps shifts node
// 2's clock; the lossless dispersionless channel makes it a pure relabeling,
// so pulses are normally supplied already aligned and the delay left at 0.
struct CascadeSpec {
    SystemParams node1;
    SystemParams node2;
    double propagation_phase = 0.0;
    double delay_ps = 0.0;
    ComplexEnvelope omega1;
    ComplexEnvelope omega2;
    NodeModelOptions opts1{};
    NodeModelOptions opts2{};
};

struct CascadeSystem {
    CascadeSpec spec;
    NodeSpace s1;
    NodeSpace s2;
    int dim = 0;
    ComplexEnvelope om1;  // gated copy
    ComplexEnvelope om2;  // gated and delay-shifted copy
    Trips h_base;
    std::vector<Trips> h_terms;
    TimeDependentOp h_eff;
    TimeDependentOp h_adj;
    CoeffPlan plan;
    std::vector<JumpOp> jumps;
    std::vector<std::string> jump_names;  // collective, intrinsic1/2, sp channels

    int index(Level l1, int n1, Level l2, int n2) const {
        return s1.index(l1, n1) * s2.dim() + s2.index(l2, n2);
    }
};

CascadeSystem build_cascade_system(const CascadeSpec& spec);

// Jump operator lists matching the single-node builders, for running those
// systems unconditionally (master equation) or stochastically.
std::vector<JumpOp> node_jump_ops(const NodeSystem& sys);
std::vector<JumpOp> source_node_jump_ops(const SourceNodeSystem& sys);

// ---- deterministic master equation ----

struct MasterOptions {
    // Steps between full density-matrix validations (Hermiticity, trace,
    // positivity). 0 disables the checks.
    int checkpoint_every = 2000;
    double positivity_tol = 1e-7;
    double trace_tol = 1e-6;
    // Observer called every observe_every steps (and at the final step).
    std::function<void(int step, const MatrixXcd& rho)> observer;
    int observe_every = 50;
};

struct MasterRun {
    TimeGrid grid;
    MatrixXcd rho_final;
    double trace_defect = 0.0;    // |trace - trace(rho0)| at the end
    double min_eigenvalue = 0.0;  // most negative eigenvalue seen at checkpoints
};

// RK4 integration of rho' = -i(H_eff rho - rho H_eff^dag) + sum_k L_k rho L_k^dag.
// H_eff must already contain the -i/2 sum L^dag L damping (and, for a
// cascade, the unidirectional coupling); the jump list supplies the
// recycling terms.
MasterRun master_equation(const TimeDependentOp& h, const CoeffPlan& plan,
                          const std::vector<JumpOp>& jumps, const MatrixXcd& rho0,
                          const TimeGrid& grid, const MasterOptions& opts = {});

// ---- Monte Carlo trajectories ----

struct TrajectoryOptions {
    int n_traj = 100;
    std::uint64_t seed = 1;
    // Safety bound on jumps handled within a single grid step.
    int max_jumps_per_step = 64;
};

struct JumpRecord {
    double t = 0.0;
    int channel = 0;  // index into the jump list
};

struct TrajectoryRun {
    TimeGrid grid;
    int n_traj = 0;
    MatrixXcd finals;    // dim x n_traj, normalized conditional states at t1
    MatrixXcd rho_mean;  // ensemble average sum |psi><psi| / n_traj
    std::vector<std::vector<JumpRecord>> jumps;
    std::uint64_t seed = 0;
};

// Waiting-time unraveling: each trajectory evolves under H_eff until its
// squared norm crosses a uniform threshold, the jump instant is found by
// exponential interpolation inside the step, a channel is drawn from the
// instantaneous fluxes and the jump applied. Trajectory k's random stream is
// seeded from (seed, k) only, so the ensemble is independent of batching or
// execution order. All trajectories share the per-step Hamiltonian assembly.
TrajectoryRun trajectories(const TimeDependentOp& h, const CoeffPlan& plan,
                           const std::vector<JumpOp>& jumps, const VectorXcd& psi0,
                           const TimeGrid& grid, const TrajectoryOptions& opts = {});

// Convenience wrappers for the two-node system.
MasterRun cascade_master(const CascadeSystem& sys, const VectorXcd& psi0, const TimeGrid& grid,
                         const MasterOptions& opts = {});
TrajectoryRun cascade_trajectories(const CascadeSystem& sys, const VectorXcd& psi0,
                                   const TimeGrid& grid, const TrajectoryOptions& opts = {});

// SplitMix64 step, used to derive independent per-trajectory seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace raman
