#pragma once

#include <numbers>
#include <optional>

#include "raman/cascade.hpp"
#include "raman/designer.hpp"
#include "raman/protocol_result.hpp"
#include "raman/reduced.hpp"

namespace raman {

// Shared two-node link configuration for the cascaded protocols. Parameters
// and truncation options may differ per node. propagation_phase is the fixed
// phase the channel adds per photon; after compensation the protocol metrics
// must not depend on it. delay_ps follows the cascade convention (a whole
// number of grid steps, pure relabeling over a lossless channel).
struct TwoNodeConfig {
    SystemParams node1 = SystemParams::standard();
    SystemParams node2 = SystemParams::standard();
    NodeModelOptions opts1{};
    NodeModelOptions opts2{};
    double propagation_phase = 0.0;
    double delay_ps = 0.0;
    DesignOptions design{};
};

// Qubit-state transfer over the link: node 1 starts in `initial`, a full
// emission pulse (angle pi/2) maps its |e> component onto the carrier
// packet, node 2 absorbs it. Success is the joint state
// |g>_1 (c_g |g> + c_e |e>)_2 up to the compensated phase drift.
struct TransferSetup {
    QubitAmplitudes initial = QubitAmplitudes::equal();
    DesignTarget carrier;  // packet shape; its theta field is ignored here
    TwoNodeConfig link;
};

// Remote entanglement: node 1 starts in |e>, a fractional pulse with angle
// theta emits only part of the excitation, node 2 absorbs the emitted
// packet. Target: cos(theta)|e g> + e^{i phi_target} sin(theta)|g e>.
struct EntangleSetup {
    double theta = std::numbers::pi / 4.0;
    double phi_target = 0.0;
    DesignTarget carrier;  // packet shape; its theta field is ignored here
    TwoNodeConfig link;
};

// Qubit swap on a single node: the stored spin qubit is emitted into the
// channel during the send window, then an unrelated incoming flying qubit is
// absorbed during the receive window. The windows must not overlap (the
// fiber must be long enough that the outgoing photon has left before the
// incoming one arrives); otherwise ScheduleError.
struct SwapSetup {
    QubitAmplitudes stored = QubitAmplitudes::ground();
    DesignTarget outgoing;  // emission carrier on the send window's grid
    Wavepacket incoming;    // arriving packet on the receive window's grid
    // Flying-qubit amplitudes carried by `incoming`; defaults to
    // (sqrt(1-n), sqrt(n)) from its photon number.
    std::optional<QubitAmplitudes> flying;
    SystemParams params = SystemParams::standard();
    NodeModelOptions opts{};
    DesignOptions design{};
};

// Linear map from the stored qubit at node 1 to the joint two-spin state,
// reconstructed from four master-equation runs (two basis states and two
// superpositions). Lets any input state and state averages be evaluated at
// the cost of four runs instead of one per input.
struct TransferChannel {
    MatrixXcd rho_gg;     // final joint block for input |g><g|
    MatrixXcd rho_ee;     // final joint block for input |e><e|
    MatrixXcd rho_cross;  // final joint block for input |g><e| (not Hermitian)

    // Joint qubit block (basis g1g2, g1e2, e1g2, e1e2) for input c_g, c_e.
    MatrixXcd apply(cd c_g, cd c_e) const;
};

ProtocolResult transfer_reduced(const TransferSetup& setup);
ProtocolResult transfer_master(const TransferSetup& setup, const MasterOptions& mopts = {});
ProtocolResult transfer_trajectories(const TransferSetup& setup,
                                     const TrajectoryOptions& topts = {});

TransferChannel transfer_channel(const TransferSetup& setup, const MasterOptions& mopts = {});

// Fidelity for one input through the reconstructed channel, maximized over
// one relative-phase compensation; also returns that phase.
double channel_fidelity(const TransferChannel& chan, const QubitAmplitudes& input,
                        double* phase = nullptr);

// Average transfer fidelity over the six cardinal states |g>, |e>,
// (|g> +- |e>)/sqrt(2), (|g> +- i|e>)/sqrt(2), all compensated with the one
// phase that is optimal for the (|g> + |e>)/sqrt(2) input.
double cardinal_average_fidelity(const TransferChannel& chan);

ProtocolResult entangle_reduced(const EntangleSetup& setup);
ProtocolResult entangle_master(const EntangleSetup& setup, const MasterOptions& mopts = {});
ProtocolResult entangle_trajectories(const EntangleSetup& setup,
                                     const TrajectoryOptions& topts = {});

ProtocolResult swap_master(const SwapSetup& setup, const MasterOptions& mopts = {});

}  // namespace raman
