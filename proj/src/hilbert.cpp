#include "raman/hilbert.hpp"

#include <cmath>

namespace raman {

void DensityMatrix::validate(const char* what) const {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10)
        throw IntegrationError(std::string(what) + ": density matrix Hermiticity defect " +
                               std::to_string(herm));
    const double tr = trace();
    if (tr < -1e-9 || tr > 1.0 + 1e-9)
        throw IntegrationError(std::string(what) + ": density matrix trace " + std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (rho + rho.adjoint()),
                                                Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -1e-7)
        throw IntegrationError(std::string(what) + ": density matrix eigenvalue " +
                               std::to_string(lmin) + " (step size too coarse?)");
}

QubitAmplitudes::QubitAmplitudes(cd g, cd e) : c_g(g), c_e(e) {
    const double n = std::norm(g) + std::norm(e);
    if (std::abs(n - 1.0) > 1e-10)
        throw std::invalid_argument("QubitAmplitudes: |c_g|^2 + |c_e|^2 = " + std::to_string(n));
}

MatrixXcd partial_trace(const MatrixXcd& rho, int d1, int d2, int keep) {
    if (rho.rows() != d1 * d2 || rho.cols() != d1 * d2)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (keep != 1 && keep != 2) throw std::invalid_argument("partial_trace: keep must be 1 or 2");
    if (keep == 1) {
        MatrixXcd out = MatrixXcd::Zero(d1, d1);
        for (int i = 0; i < d1; ++i)
            for (int j = 0; j < d1; ++j)
                for (int k = 0; k < d2; ++k) out(i, j) += rho(i * d2 + k, j * d2 + k);
        return out;
    }
    MatrixXcd out = MatrixXcd::Zero(d2, d2);
    for (int i = 0; i < d2; ++i)
        for (int j = 0; j < d2; ++j)
            for (int k = 0; k < d1; ++k) out(i, j) += rho(k * d2 + i, k * d2 + j);
    return out;
}

double von_neumann_entropy(const MatrixXcd& rho) {
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10)
        throw std::invalid_argument("von_neumann_entropy: matrix not Hermitian, defect " +
                                    std::to_string(herm));
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double p = es.eigenvalues()[i];
        if (p < -1e-9)
            throw std::invalid_argument("von_neumann_entropy: negative eigenvalue " +
                                        std::to_string(p));
        if (p <= 0.0) continue;
        s -= p * std::log2(p);
    }
    return s;
}

}  // namespace raman
