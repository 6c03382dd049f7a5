#pragma once

#include "raman/wavepacket.hpp"

namespace raman {

enum class ShapeKind { sech, gaussian, sampled };

// Emission target for the pulse designer: a unit-norm temporal shape, the
// emission mixing angle theta (sin^2 theta is the emitted photon number) and
// the first two time derivatives of the shape, which the designer needs.
//
// For the analytic shapes the derivatives are closed-form and the
// normalization is the closed-form one over the whole real line: the small
// tail mass outside the window is then genuine headroom in the feasibility
// budget, which is what keeps a full-emission design non-negative at the
// window edge. The window must still hold the shape's mass to within the
// wavepacket norm tolerance (1e-6), i.e. span roughly +-7 widths or more.
// Sampled targets are instead renormalized on their grid (their provenance
// quadrature is unknown) and differentiated by centered finite differences
// with a conditioning check.
struct DesignTarget {
    Wavepacket shape;       // unit norm, mean_photon_number stored as 1
    double theta = 0.0;     // emission angle, [0, pi/2]
    ShapeKind kind = ShapeKind::sampled;
    double width_ps = 0.0;  // analytic shapes only
    double center_ps = 0.0;
    ComplexEnvelope d1, d2;  // derivatives of the normalized shape

    // f(t) = sech((t - center)/width) / sqrt(2 width).
    static DesignTarget sech(const TimeGrid& grid, double width_ps, double center_ps,
                             double theta);

    // f(t) = pi^(-1/4) sigma^(-1/2) exp(-(t - center)^2 / (2 sigma^2)).
    static DesignTarget gaussian(const TimeGrid& grid, double sigma_ps, double center_ps,
                                 double theta);

    // Arbitrary sampled shape; derivatives by centered differences. Throws
    // DerivativeNoiseError when dt is too coarse for a trustworthy second
    // derivative (dt^2 ||f''||_inf > 1e-3 ||f||_inf).
    static DesignTarget sampled(const Wavepacket& wp, double theta);

    // The time-reversed absorption target conj(f(t0 + t1 - t)), same theta.
    DesignTarget reversed() const;
};

}  // namespace raman
