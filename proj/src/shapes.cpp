#include "raman/shapes.hpp"

#include <cmath>
#include <numbers>

namespace raman {

namespace {

void check_theta(double theta) {
    if (!(theta >= 0.0) || theta > std::numbers::pi / 2.0 + 1e-12)
        throw std::invalid_argument("DesignTarget: theta must lie in [0, pi/2]");
}

// Rescale samples and derivatives by a common factor so the trapezoidal
// norm^2 of the shape on its grid is exactly 1.
void renormalize(ComplexEnvelope& f, ComplexEnvelope& d1, ComplexEnvelope& d2) {
    const double n2 = trapz_abs2(f);
    if (!(n2 > 0.0)) throw std::invalid_argument("DesignTarget: shape has zero norm");
    const double s = 1.0 / std::sqrt(n2);
    for (int i = 0; i < f.size(); ++i) {
        f[i] *= s;
        d1[i] *= s;
        d2[i] *= s;
    }
}

}  // namespace

DesignTarget DesignTarget::sech(const TimeGrid& grid, double width_ps, double center_ps,
                                double theta) {
    check_theta(theta);
    if (!(width_ps > 0.0)) throw std::invalid_argument("DesignTarget: width must be > 0");
    const double w = width_ps, a = 1.0 / std::sqrt(2.0 * w);
    ComplexEnvelope f(grid), d1(grid), d2(grid);
    for (int i = 0; i < grid.size(); ++i) {
        const double u = (grid.time(i) - center_ps) / w;
        const double s = 1.0 / std::cosh(u), th = std::tanh(u);
        f[i] = a * s;
        d1[i] = -(a / w) * s * th;
        d2[i] = (a / (w * w)) * s * (1.0 - 2.0 * s * s);
    }
    DesignTarget t;
    t.shape = Wavepacket(f, 1.0);
    t.theta = theta;
    t.kind = ShapeKind::sech;
    t.width_ps = width_ps;
    t.center_ps = center_ps;
    t.d1 = std::move(d1);
    t.d2 = std::move(d2);
    return t;
}

DesignTarget DesignTarget::gaussian(const TimeGrid& grid, double sigma_ps, double center_ps,
                                    double theta) {
    check_theta(theta);
    if (!(sigma_ps > 0.0)) throw std::invalid_argument("DesignTarget: sigma must be > 0");
    const double s2 = sigma_ps * sigma_ps;
    const double a = std::pow(std::numbers::pi, -0.25) / std::sqrt(sigma_ps);
    ComplexEnvelope f(grid), d1(grid), d2(grid);
    for (int i = 0; i < grid.size(); ++i) {
        const double x = grid.time(i) - center_ps;
        const double g = a * std::exp(-x * x / (2.0 * s2));
        f[i] = g;
        d1[i] = -(x / s2) * g;
        d2[i] = (x * x / s2 - 1.0) / s2 * g;
    }
    DesignTarget t;
    t.shape = Wavepacket(f, 1.0);
    t.theta = theta;
    t.kind = ShapeKind::gaussian;
    t.width_ps = sigma_ps;
    t.center_ps = center_ps;
    t.d1 = std::move(d1);
    t.d2 = std::move(d2);
    return t;
}

DesignTarget DesignTarget::sampled(const Wavepacket& wp, double theta) {
    check_theta(theta);
    if (wp.is_vacuum()) throw std::invalid_argument("DesignTarget: cannot target the vacuum packet");
    ComplexEnvelope f = wp.envelope;
    const TimeGrid& grid = f.grid;
    const double dt = grid.dt();
    const int n = f.size();
    ComplexEnvelope d1(grid), d2(grid);
    for (int i = 1; i + 1 < n; ++i) {
        d1[i] = (f[i + 1] - f[i - 1]) / (2.0 * dt);
        d2[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dt * dt);
    }
    // One-sided first derivatives at the window edges; the curvature there is
    // taken from the nearest interior point (targets are expected to have
    // negligible tails at the edges anyway).
    d1[0] = (f[1] - f[0]) / dt;
    d1[n - 1] = (f[n - 1] - f[n - 2]) / dt;
    d2[0] = d2[1];
    d2[n - 1] = d2[n - 2];

    double fmax = 0.0, d2max = 0.0;
    for (int i = 0; i < n; ++i) {
        fmax = std::max(fmax, std::abs(f[i]));
        d2max = std::max(d2max, std::abs(d2[i]));
    }
    if (d2max * dt * dt > 1e-3 * fmax)
        throw DerivativeNoiseError(
            "DesignTarget::sampled: grid too coarse for finite-difference curvature "
            "(dt^2 |f''| = " +
            std::to_string(d2max * dt * dt) + " vs |f| = " + std::to_string(fmax) + ")");

    renormalize(f, d1, d2);
    DesignTarget t;
    t.shape = Wavepacket(f, 1.0);
    t.theta = theta;
    t.kind = ShapeKind::sampled;
    t.d1 = std::move(d1);
    t.d2 = std::move(d2);
    return t;
}

DesignTarget DesignTarget::reversed() const {
    DesignTarget t;
    t.shape = Wavepacket(shape.envelope.reversed_conj(), 1.0);
    t.theta = theta;
    t.kind = kind;
    t.width_ps = width_ps;
    // mirror the center about the window midpoint
    t.center_ps = shape.envelope.grid.t_start + shape.envelope.grid.t_end - center_ps;
    // d/dt conj(f(T - t)) = -conj(f'(T - t)), and the second derivative keeps its sign
    t.d1 = ComplexEnvelope(shape.envelope.grid);
    t.d2 = ComplexEnvelope(shape.envelope.grid);
    const int n = shape.envelope.size();
    for (int i = 0; i < n; ++i) {
        t.d1[i] = -std::conj(d1[n - 1 - i]);
        t.d2[i] = std::conj(d2[n - 1 - i]);
    }
    return t;
}

}  // namespace raman
