// Small dense complex matrix/vector helpers shared across the library.
// Sizes are tiny (antennas, chips, despread vectors), so everything is
// plain row-major std::vector storage with no expression templates.

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace csim {

using cd = std::complex<double>;
using cvec = std::vector<cd>;

struct CMat {
    int rows = 0;
    int cols = 0;
    std::vector<cd> a;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    cd& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const cd& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    bool same_shape(const CMat& o) const { return rows == o.rows && cols == o.cols; }
};

inline CMat matmul(const CMat& x, const CMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matmul: inner dimensions differ");
    CMat out(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int k = 0; k < x.cols; ++k) {
            const cd v = x(i, k);
            if (v == cd(0.0, 0.0)) continue;
            for (int j = 0; j < y.cols; ++j) out(i, j) += v * y(k, j);
        }
    }
    return out;
}

// B such that B = A^H
inline CMat hermitian_transpose(const CMat& x) {
    CMat out(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) out(j, i) = std::conj(x(i, j));
    return out;
}

inline CMat operator-(const CMat& x, const CMat& y) {
    if (!x.same_shape(y)) throw std::invalid_argument("matrix subtraction: shape mismatch");
    CMat out = x;
    for (size_t i = 0; i < out.a.size(); ++i) out.a[i] -= y.a[i];
    return out;
}

inline double frob2(const CMat& x) {
    double s = 0.0;
    for (const cd& v : x.a) s += std::norm(v);
    return s;
}

inline double norm2(const cvec& v) {
    double s = 0.0;
    for (const cd& x : v) s += std::norm(x);
    return s;
}

// <a, b> = a^H b
inline cd vdot(const cvec& x, const cvec& y) {
    cd s(0.0, 0.0);
    for (size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

} // namespace csim
