#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "raman/grid.hpp"
#include "raman/hilbert.hpp"
#include "raman/params.hpp"
#include "raman/protocol_result.hpp"
#include "raman/shapes.hpp"
#include "raman/sparse.hpp"
#include "raman/wavepacket.hpp"

namespace raman {

struct NodeModelOptions {
    // Keep the counter-rotating laser leg and the detuned cavity leg. With
    // both switched off the four-level model reduces exactly to the resonant
    // three-amplitude dynamics.
    bool include_offresonant = true;
    // Branching of trion spontaneous emission into the cavity-leg ground
    // state (|t> -> |g| and |tbar> -> |e>); the remainder goes to the
    // laser-leg ground state. Total loss is branching independent.
    double sp_split_to_g = 0.5;
    // Raised-cosine gate applied over this many samples at both ends of the
    // drive envelope so the pulse switches on and off smoothly.
    int edge_gate_steps = 5;

    void validate() const;
};

// Copy of the envelope with the raised-cosine edge gate applied over the
// first and last `steps` samples.
ComplexEnvelope edge_gated(const ComplexEnvelope& omega, int steps);

// Sparse matrix elements of the elementary node operators on the
// level x Fock product space. Rates and couplings are not folded in here
// except where noted; callers scale the triplets as needed.
struct NodeOps {
    NodeSpace space;
    Trips laser_res;              // |t><e|, resonant drive leg
    Trips laser_off;              // |tbar><g|, detuned drive leg
    Trips cav_res;                // a^dag |g><t|, resonant cavity leg
    Trips cav_off;                // a^dag |e><tbar|, detuned cavity leg
    Trips a;                      // cavity annihilation
    Trips num;                    // a^dag a
    Trips trion;                  // projector onto both trion levels
    std::vector<Trips> sp_jumps;  // four dipole decay channels, sqrt-rates folded in

    NodeOps(const SystemParams& p, const NodeModelOptions& o);
};

// Static and drive-scaled parts of one node's effective Hamiltonian. The
// base holds the resonant cavity coupling and the -i/2 damping diagonal;
// the term list matches CoeffPlan::add_node slot order.
struct NodeHamiltonianPieces {
    Trips base;
    std::vector<Trips> terms;
};

NodeHamiltonianPieces node_hamiltonian_pieces(const SystemParams& params,
                                              const NodeModelOptions& opts);

// Produces the time-dependent coefficients for the slots of an effective
// Hamiltonian at the three sample points an RK4 step needs (stage 0 = t_i,
// 1 = midpoint, 2 = t_{i+1}). Envelopes are interpolated linearly at the
// midpoint; oscillating phases are evaluated exactly.
class CoeffPlan {
  public:
    int add_node(ComplexEnvelope omega, double delta, bool offresonant);
    int add_source(std::vector<cd> kappa);
    int n_slots() const { return n_slots_; }
    void fill(int i, int stage, double t, cd* out) const;
    // Coefficients at an arbitrary point inside interval i: envelopes are
    // interpolated with the fraction, phases evaluated exactly at t. Used by
    // the trajectory engine when a jump lands between grid samples.
    void fill_interp(int i, double frac, double t, cd* out) const;

  private:
    struct NodeEntry {
        ComplexEnvelope omega;
        double delta;
        bool offresonant;
        int slot0;
    };
    struct SourceEntry {
        std::vector<cd> kappa;
        int slot0;
    };
    std::vector<NodeEntry> nodes_;
    std::vector<SourceEntry> sources_;
    int n_slots_ = 0;
};

// Conditional no-jump evolution i dpsi/dt = H_eff(t) psi with norm decay
// routed into per-channel flux records flux[k][i] = ||L_k psi(t_i)||^2.
struct NoJumpOutput {
    MatrixXcd psi;  // dim x (n_steps + 1), one column per grid sample
    std::vector<std::vector<double>> flux;
};

NoJumpOutput evolve_nojump(const TimeDependentOp& h, const CoeffPlan& plan,
                           const std::vector<SparseOp>& flux_ops, const VectorXcd& psi0,
                           const TimeGrid& grid);

// Backward sweep of the adjoint propagator: chi(t) = U(t1, t)^dag chi(t1),
// with dchi/dt = -i H_eff(t)^dag chi. Used to score single-jump histories.
MatrixXcd evolve_adjoint_backward(const TimeDependentOp& h_adj, const CoeffPlan& plan,
                                  const VectorXcd& chi_final, const TimeGrid& grid);

// One cavity-QED node driven by a classical pulse. Flux operator order:
// channel, intrinsic cavity loss, then the four spontaneous channels.
struct NodeSystem {
    NodeSpace space;
    SystemParams params;
    NodeModelOptions opts;
    ComplexEnvelope omega;  // edge-gated copy of the drive
    Trips h_base;
    std::vector<Trips> h_terms;
    TimeDependentOp h_eff;
    TimeDependentOp h_adj;
    CoeffPlan plan;
    std::vector<SparseOp> flux_ops;
    SparseOp a_op;
};

NodeSystem build_node_system(const ComplexEnvelope& omega, const SystemParams& params,
                             const NodeModelOptions& opts = {});

// Virtual-source construction for driving a node with a prescribed incoming
// single-photon envelope: a two-level source (index 0 = vacuum leg) is
// cascaded into the node, kappa(t) = f(t)/sqrt(remaining weight). Joint
// index = source_index * node_dim + node_index. Flux operator order:
// collective output (source + node), intrinsic loss, four spontaneous
// channels.
struct SourceNodeSystem {
    NodeSpace space;
    SystemParams params;
    NodeModelOptions opts;
    int dim;
    ComplexEnvelope omega;
    std::vector<cd> kappa;
    Trips h_base;
    std::vector<Trips> h_terms;
    TimeDependentOp h_eff;
    TimeDependentOp h_adj;
    CoeffPlan plan;
    std::vector<SparseOp> flux_ops;
    SparseOp b_op;        // source lowering operator on the joint space
    SparseOp a_joint;     // node cavity operator on the joint space
    int slot_kappa;       // coefficient slot carrying kappa(t)

    int index(int src_excited, Level l, int n) const {
        return src_excited * space.dim() + space.index(l, n);
    }
};

SourceNodeSystem build_source_node_system(const ComplexEnvelope& incoming,
                                          const ComplexEnvelope& omega,
                                          const SystemParams& params,
                                          const NodeModelOptions& opts = {});

// Dense Hamiltonian snapshot H_eff(t) for a frozen drive value, used by
// structure tests (block decoupling, Hermiticity of the coherent part).
MatrixXcd node_h_dense(const SystemParams& params, const NodeModelOptions& opts, cd omega_value,
                       double t);

// Emission run: initial spin superposition, vacuum cavity. The one-photon
// record is sqrt(gamma) <g, 1|psi(t)>; its square integral plus the ground
// amplitude account for everything that is not an error.
struct SendOutcome {
    TimeGrid grid;
    ComplexEnvelope one_photon;
    Wavepacket packet;  // normalized one_photon with its photon number
    cd amp_vacuum{0.0, 0.0};
    double phi_g = 0.0;          // phase picked up by the ground branch
    double p_one = 0.0;          // total emitted single-photon weight
    double p_error = 0.0;        // 1 - |amp_vacuum|^2 - p_one
    double p_spontaneous = 0.0;  // trion decay loss
    double p_intrinsic = 0.0;    // undetected cavity loss
    double p_multi = 0.0;        // channel flux outside the one-photon record
    double p_residual = 0.0;     // excitation left in the node at t1
    double p_error_offresonant = 0.0;  // p_error minus spontaneous and intrinsic parts
    double pulse_fidelity = 0.0;   // |<target | emitted amplitude>|, includes emission efficiency
    double shape_overlap = 0.0;    // |<target | normalized packet>|, shape match alone
    double overall_fidelity = 0.0;     // phase-compensated state mapping fidelity
    double truncation_weight = 0.0;    // peak population of the top Fock layer
    bool truncation_warning = false;
    VectorXcd final_state;
};

SendOutcome send_full(const QubitAmplitudes& init, const ComplexEnvelope& omega,
                      const SystemParams& params, const NodeModelOptions& opts = {},
                      const DesignTarget* target = nullptr);

// AC-Stark phase accumulated by |g, 0> under the full drive, from the
// unwrapped argument of its amplitude. Requires the ground state to stay
// mostly unexcited over the pulse.
struct PhaseDriftResult {
    TimeGrid grid;
    std::vector<double> phi;
    double phi_final = 0.0;
    double ground_norm = 0.0;
};

PhaseDriftResult extract_phase_drift(const ComplexEnvelope& omega, const SystemParams& params,
                                     const NodeModelOptions& opts = {});

// Absorption run driven through the virtual source. The flying qubit
// amplitudes default to (sqrt(1 - n), sqrt(n)) from the packet's photon
// number; pass explicit amplitudes to keep a sender's phases.
ProtocolResult receive_full(const Wavepacket& incoming, const ComplexEnvelope& omega,
                            const SystemParams& params, const NodeModelOptions& opts = {},
                            const std::optional<QubitAmplitudes>& flying = std::nullopt);

}  // namespace raman
