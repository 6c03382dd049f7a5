#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "raman/errors.hpp"

namespace raman {

using cd = std::complex<double>;

// Uniform time grid over [t_start, t_end] with n_steps intervals
// (n_steps + 1 sample points). Times are in ps.
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    int n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double t0, double t1, int n) : t_start(t0), t_end(t1), n_steps(n) {
        if (!(t_end > t_start))
            throw std::invalid_argument("TimeGrid: t_end must exceed t_start");
        if (n_steps < 2)
            throw std::invalid_argument("TimeGrid: need at least 2 steps");
    }

    double dt() const { return (t_end - t_start) / n_steps; }
    int size() const { return n_steps + 1; }
    double time(int i) const { return t_start + dt() * i; }

    bool operator==(const TimeGrid& o) const {
        return t_start == o.t_start && t_end == o.t_end && n_steps == o.n_steps;
    }
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
    if (!(a == b)) throw GridMismatchError(std::string(what) + ": time grids differ");
}

// Complex-valued time series on a grid. Used for pulse envelopes, field
// amplitudes and any other sampled signal.
struct ComplexEnvelope {
    TimeGrid grid;
    std::vector<cd> v;

    ComplexEnvelope() = default;
    explicit ComplexEnvelope(const TimeGrid& g) : grid(g), v(g.size(), cd(0.0)) {}

    template <class F>
    static ComplexEnvelope sample(const TimeGrid& g, F f) {
        ComplexEnvelope e(g);
        for (int i = 0; i < g.size(); ++i) e.v[i] = f(g.time(i));
        return e;
    }

    int size() const { return static_cast<int>(v.size()); }
    cd operator[](int i) const { return v[i]; }
    cd& operator[](int i) { return v[i]; }

    // Value halfway between samples i and i+1 (linear interpolation), used by
    // the RK4 drivers for midpoint stages.
    cd mid(int i) const { return 0.5 * (v[i] + v[i + 1]); }

    void check_finite(const char* what) const {
        for (const cd& x : v)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
                throw std::invalid_argument(std::string(what) + ": non-finite sample");
    }

    // conj-reversed copy about the window midpoint: out(t) = conj(in(t0+t1-t)).
    ComplexEnvelope reversed_conj() const {
        ComplexEnvelope out(grid);
        const int n = size();
        for (int i = 0; i < n; ++i) out.v[i] = std::conj(v[n - 1 - i]);
        return out;
    }
};

// ---- trapezoidal quadrature on a grid ----

inline double trapz_abs2(const ComplexEnvelope& e) {
    const double dt = e.grid.dt();
    double s = 0.0;
    for (int i = 0; i + 1 < e.size(); ++i)
        s += 0.5 * dt * (std::norm(e.v[i]) + std::norm(e.v[i + 1]));
    return s;
}

// Cumulative version: out[i] = integral of |e|^2 from t_start to t_i.
inline std::vector<double> cumtrapz_abs2(const ComplexEnvelope& e) {
    const double dt = e.grid.dt();
    std::vector<double> c(e.size());
    c[0] = 0.0;
    for (int i = 0; i + 1 < e.size(); ++i)
        c[i + 1] = c[i] + 0.5 * dt * (std::norm(e.v[i]) + std::norm(e.v[i + 1]));
    return c;
}

inline cd trapz_inner(const ComplexEnvelope& a, const ComplexEnvelope& b) {
    require_same_grid(a.grid, b.grid, "trapz_inner");
    const double dt = a.grid.dt();
    cd s = 0.0;
    for (int i = 0; i + 1 < a.size(); ++i)
        s += 0.5 * dt * (std::conj(a.v[i]) * b.v[i] + std::conj(a.v[i + 1]) * b.v[i + 1]);
    return s;
}

}  // namespace raman
