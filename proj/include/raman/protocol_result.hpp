#pragma once

#include <map>
#include <string>

#include "raman/hilbert.hpp"

namespace raman {

// Uniform result container for the interface protocols (receive, transfer,
// entangle, swap). rho_final is the unnormalized density matrix projected
// onto the relevant qubit subspace (spin x spin for two-node protocols, spin
// only for single-node ones); its missing trace is the leaked weight.
// Ordered maps keep serialized output deterministic.
struct ProtocolResult {
    std::string method;  // "nojump" | "reduced" | "master" | "trajectories"
    MatrixXcd rho_final;
    std::map<std::string, double> metrics;
    std::map<std::string, cd> amplitudes;
    std::map<std::string, double> stderrs;  // standard errors (trajectories only)
};

}  // namespace raman
