#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gm/errors.hpp"

namespace gm {

/// Row-major dense matrix, just big enough for the Newton linear algebra.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;   // n*n, row-major

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Solves A x = b by LU with partial pivoting. A is consumed in place.
/// Throws DomainError on (numerically) singular pivots.
inline std::vector<double> lu_solve(DenseMatrix A, std::vector<double> b) {
    const std::size_t n = A.n;
    if (b.size() != n) throw DomainError("lu_solve: size mismatch");
    std::vector<std::size_t> piv(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(A(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > best) {
                best = std::abs(A(i, k));
                p = i;
            }
        if (!(best > 0.0) || !std::isfinite(best))
            throw DomainError("lu_solve: singular matrix at pivot " + std::to_string(k));
        piv[k] = p;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            std::swap(b[k], b[p]);
        }
        const double inv = 1.0 / A(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = A(i, k) * inv;
            if (m == 0.0) continue;
            A(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= A(ii, j) * x[j];
        x[ii] = s / A(ii, ii);
    }
    return x;
}

} // namespace gm
