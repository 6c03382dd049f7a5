#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

namespace raman {

using cd = std::complex<double>;

struct Triplet {
    int i = 0, j = 0;
    cd v{0.0};
};
using Trips = std::vector<Triplet>;

// Append the Hermitian conjugate of every entry.
inline void add_hc(Trips& t) {
    const size_t n = t.size();
    for (size_t k = 0; k < n; ++k) t.push_back({t[k].j, t[k].i, std::conj(t[k].v)});
}

// Kronecker product of triplet lists, index = i_a * dim_b + i_b.
inline Trips kron_trips(const Trips& a, const Trips& b, int dim_b) {
    Trips out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b)
            out.push_back({x.i * dim_b + y.i, x.j * dim_b + y.j, x.v * y.v});
    return out;
}

inline Trips identity_trips(int dim) {
    Trips out(dim);
    for (int i = 0; i < dim; ++i) out[i] = {i, i, cd(1.0)};
    return out;
}

inline Trips adjoint_trips(const Trips& t) {
    Trips out;
    out.reserve(t.size());
    for (const auto& e : t) out.push_back({e.j, e.i, std::conj(e.v)});
    return out;
}

inline Trips scaled_trips(Trips t, cd factor) {
    for (auto& e : t) e.v *= factor;
    return t;
}

// Static CSR operator with complex entries.
struct SparseOp {
    int rows = 0, cols = 0;
    std::vector<int> ptr, idx;
    std::vector<cd> val;

    static SparseOp from_triplets(int rows, int cols, const Trips& trips) {
        SparseOp op;
        op.rows = rows;
        op.cols = cols;
        std::map<std::pair<int, int>, cd> acc;
        for (const auto& t : trips) {
            if (t.i < 0 || t.i >= rows || t.j < 0 || t.j >= cols)
                throw std::invalid_argument("SparseOp: triplet out of range");
            acc[{t.i, t.j}] += t.v;
        }
        op.ptr.assign(rows + 1, 0);
        for (const auto& [ij, v] : acc) ++op.ptr[ij.first + 1];
        for (int i = 0; i < rows; ++i) op.ptr[i + 1] += op.ptr[i];
        op.idx.resize(acc.size());
        op.val.resize(acc.size());
        int k = 0;
        for (const auto& [ij, v] : acc) {
            op.idx[k] = ij.second;
            op.val[k] = v;
            ++k;
        }
        return op;
    }

    int nnz() const { return static_cast<int>(val.size()); }

    // y = A x
    void apply(const cd* x, cd* y) const {
        for (int i = 0; i < rows; ++i) {
            cd s = 0.0;
            for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
            y[i] = s;
        }
    }

    // y += scale * A * x
    void apply_add(const cd* x, cd* y, cd scale) const {
        for (int i = 0; i < rows; ++i) {
            cd s = 0.0;
            for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
            y[i] += scale * s;
        }
    }

    // ||A x||^2
    double flux(const cd* x) const {
        double out = 0.0;
        for (int i = 0; i < rows; ++i) {
            cd s = 0.0;
            for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
            out += std::norm(s);
        }
        return out;
    }

    // Y = A X for col-major X (cols x m) and Y (rows x m).
    void apply_mat(const cd* x, cd* y, int m) const {
        for (int c = 0; c < m; ++c)
            apply(x + static_cast<size_t>(c) * cols, y + static_cast<size_t>(c) * rows);
    }

    // Y += scale * A X
    void apply_mat_add(const cd* x, cd* y, cd scale, int m) const {
        for (int c = 0; c < m; ++c)
            apply_add(x + static_cast<size_t>(c) * cols, y + static_cast<size_t>(c) * rows,
                      scale);
    }
};

// Fixed sparsity pattern whose values are base + sum_k coeff_k * term_k.
// Used for the effective Hamiltonians: the pattern never changes during a
// run, only a handful of scalar coefficients (pulse samples, oscillating
// exponentials), so reassembly is a cheap axpy over the nonzeros.
struct TimeDependentOp {
    int dim = 0;
    std::vector<int> ptr, idx;
    std::vector<cd> base;
    std::vector<std::vector<cd>> term;

    static TimeDependentOp build(int dim, const Trips& base_trips,
                                 const std::vector<Trips>& term_trips) {
        TimeDependentOp op;
        op.dim = dim;
        std::map<std::pair<int, int>, int> pos;  // (i,j) -> slot in value arrays
        auto touch = [&](const Trips& ts) {
            for (const auto& t : ts) {
                if (t.i < 0 || t.i >= dim || t.j < 0 || t.j >= dim)
                    throw std::invalid_argument("TimeDependentOp: triplet out of range");
                pos.emplace(std::make_pair(t.i, t.j), 0);
            }
        };
        touch(base_trips);
        for (const auto& ts : term_trips) touch(ts);

        op.ptr.assign(dim + 1, 0);
        for (const auto& [ij, _] : pos) ++op.ptr[ij.first + 1];
        for (int i = 0; i < dim; ++i) op.ptr[i + 1] += op.ptr[i];
        op.idx.resize(pos.size());
        int k = 0;
        for (auto& [ij, slot] : pos) {
            op.idx[k] = ij.second;
            slot = k;
            ++k;
        }
        const size_t nnz = pos.size();
        op.base.assign(nnz, cd(0.0));
        for (const auto& t : base_trips) op.base[pos[{t.i, t.j}]] += t.v;
        op.term.resize(term_trips.size());
        for (size_t m = 0; m < term_trips.size(); ++m) {
            op.term[m].assign(nnz, cd(0.0));
            for (const auto& t : term_trips[m]) op.term[m][pos[{t.i, t.j}]] += t.v;
        }
        return op;
    }

    int nnz() const { return static_cast<int>(base.size()); }

    // vals = scale * (base + sum coeff_k term_k)
    void assemble(const cd* coeffs, cd scale, std::vector<cd>& vals) const {
        vals.resize(base.size());
        std::copy(base.begin(), base.end(), vals.begin());
        for (size_t m = 0; m < term.size(); ++m) {
            const cd c = coeffs[m];
            if (c == cd(0.0)) continue;
            const auto& tv = term[m];
            for (size_t k = 0; k < tv.size(); ++k) vals[k] += c * tv[k];
        }
        if (scale != cd(1.0))
            for (cd& v : vals) v *= scale;
    }

    // y = A x with the given assembled values
    void apply(const std::vector<cd>& vals, const cd* x, cd* y) const {
        for (int i = 0; i < dim; ++i) {
            cd s = 0.0;
            for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += vals[k] * x[idx[k]];
            y[i] = s;
        }
    }

    // Y = A X for col-major X, Y of shape dim x m (leading dimension dim).
    void apply_mat(const std::vector<cd>& vals, const cd* x, cd* y, int m) const {
        for (int c = 0; c < m; ++c) apply(vals, x + static_cast<size_t>(c) * dim,
                                          y + static_cast<size_t>(c) * dim);
    }
};

}  // namespace raman
