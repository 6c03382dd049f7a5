#pragma once

#include <Eigen/Dense>
#include <complex>

#include "raman/grid.hpp"

namespace raman {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Electronic levels of one node. |g>, |e> are the spin qubit states,
// |t>, |tbar> the two (degenerate) trion states.
enum class Level : int { g = 0, e = 1, t = 2, tbar = 3 };

// Index bookkeeping for one node: 4 electronic levels tensor a truncated
// cavity Fock space 0..n_max. States are ordered photon-major:
// index = 4*n + level.
struct NodeSpace {
    int n_max = 3;

    NodeSpace() = default;
    explicit NodeSpace(int nmax) : n_max(nmax) {
        if (nmax < 1) throw std::invalid_argument("NodeSpace: n_max must be >= 1");
    }

    int dim() const { return 4 * (n_max + 1); }
    int index(Level l, int n) const {
        if (n < 0 || n > n_max) throw std::out_of_range("NodeSpace: photon number out of range");
        return 4 * n + static_cast<int>(l);
    }
    Level level_of(int idx) const { return static_cast<Level>(idx % 4); }
    int photons_of(int idx) const { return idx / 4; }
};

// Pure state of one node (or a tensor product of nodes) under non-Hermitian
// no-jump evolution. accumulated_loss tracks the probability flux that left
// through the jump channels, integrated independently of the norm, so that
// norm^2 + accumulated_loss = 1 serves as an integrator check.
struct PureState {
    VectorXcd amp;
    double accumulated_loss = 0.0;

    double norm2() const { return amp.squaredNorm(); }
    // |norm^2 + loss - 1|, should stay below ~1e-8 for a healthy run.
    double bookkeeping_defect() const { return std::abs(norm2() + accumulated_loss - 1.0); }
};

// Density matrix with validation helpers used at integrator checkpoints.
struct DensityMatrix {
    MatrixXcd rho;

    DensityMatrix() = default;
    explicit DensityMatrix(MatrixXcd m) : rho(std::move(m)) {}

    double trace() const { return rho.trace().real(); }

    // Hermiticity within 1e-10, eigenvalues >= -1e-9, trace in [0, 1 + 1e-9].
    void validate(const char* what) const;
};

// Spin qubit amplitudes (c_g, c_e), |c_g|^2 + |c_e|^2 = 1 within 1e-10.
struct QubitAmplitudes {
    cd c_g{0.0};
    cd c_e{0.0};

    QubitAmplitudes() = default;
    QubitAmplitudes(cd g, cd e);

    static QubitAmplitudes ground() { return {1.0, 0.0}; }
    static QubitAmplitudes excited() { return {0.0, 1.0}; }
    static QubitAmplitudes equal() { return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}; }
};

// Trace out one factor of a bipartite density matrix (dim = d1 * d2,
// index = i1 * d2 + i2). keep = 1 keeps the first factor, keep = 2 the second.
MatrixXcd partial_trace(const MatrixXcd& rho, int d1, int d2, int keep);

// Von Neumann entropy in bits, -sum p log2 p over the eigenvalues.
// Eigenvalues in [-1e-9, 0] are clamped to zero; anything more negative, or a
// Hermiticity defect beyond 1e-10, is an error.
double von_neumann_entropy(const MatrixXcd& rho);

}  // namespace raman
