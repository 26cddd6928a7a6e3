#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gm/errors.hpp"
#include "gm/grid.hpp"
#include "gm/sparse.hpp"

namespace gm {

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace detail

namespace detail {

// One preconditioned CG sweep on the weighted symmetric form W A d = rhs_w,
// stopping on the recurrence residual. Returns the correction d.
inline std::vector<double> cg_sweep(const SparseOperator& A,
                                    const std::vector<double>& rhs_w,
                                    const std::vector<double>& idiag,
                                    std::size_t max_iter) {
    const std::size_t n = A.rows;
    std::vector<double> d(n, 0.0);
    std::vector<double> r = rhs_w;
    std::vector<double> z(n), p(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = idiag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    const double rz0 = rz;
    if (rz0 == 0.0) return d;

    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<double> Sp = A.apply_weighted(p);
        const double pSp = dot(p, Sp);
        if (pSp == 0.0 || rz == 0.0) break;   // recurrence exhausted
        if (!(pSp > 0))
            throw SolverError("cg_solve: operator not positive definite", pSp);
        const double alpha = rz / pSp;
        for (std::size_t i = 0; i < n; ++i) d[i] += alpha * p[i];
        for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * Sp[i];
        for (std::size_t i = 0; i < n; ++i) z[i] = idiag[i] * r[i];
        const double rz_new = dot(r, z);
        if (rz_new <= 1e-28 * rz0) break;
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return d;
}

} // namespace detail

/// Conjugate gradient for A x = b. Internally iterates on the weighted
/// symmetric form W A x = W b with Jacobi preconditioning; restarted with
/// iterative refinement on the strong residual, so the stopping test
/// ||A x - b||_2 <= tol ||b||_2 holds in exact (unweighted) terms.
/// All reductions are sequential.
inline std::vector<double> cg_solve(const SparseOperator& A,
                                    const std::vector<double>& b,
                                    double tol = 1e-12,
                                    std::size_t max_iter = 100000,
                                    bool diagonal_preconditioner = true) {
    if (!(tol > 0)) throw DomainError("cg_solve: tol must be positive");
    if (b.size() != A.rows) throw DomainError("cg_solve: rhs size mismatch");
    const std::size_t n = A.rows;

    const double bnorm = detail::norm2(b);
    std::vector<double> x(n, 0.0);
    if (bnorm == 0.0) return x;

    std::vector<double> idiag(n, 1.0);
    if (diagonal_preconditioner)
        for (std::size_t r = 0; r < n; ++r)
            idiag[r] = 1.0 / (A.row_weight[r] * A.entry(r, r));

    // max absolute row sum, the scale of rounding in evaluating A x - b
    double anorm = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
            s += std::abs(A.vals[k]);
        anorm = std::max(anorm, s);
    }

    const std::size_t sweep_iter = std::min<std::size_t>(max_iter, 10 * n + 200);
    double last = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 50; ++restart) {
        // backward-error test on the strong residual
        std::vector<double> res = A.apply(x);
        for (std::size_t i = 0; i < n; ++i) res[i] = b[i] - res[i];
        const double rs = detail::norm2(res);
        if (rs <= tol * (bnorm + anorm * detail::norm2(x))) return x;
        if (restart > 2 && rs > 0.9 * last)
            throw SolverError("cg_solve: stalled at relative residual " +
                                  std::to_string(rs / bnorm),
                              rs);
        last = rs;
        for (std::size_t i = 0; i < n; ++i) res[i] *= A.row_weight[i];
        const std::vector<double> d = detail::cg_sweep(A, res, idiag, sweep_iter);
        for (std::size_t i = 0; i < n; ++i) x[i] += d[i];
    }
    std::vector<double> Ax = A.apply(x);
    double rs = 0.0;
    for (std::size_t i = 0; i < n; ++i) rs += (Ax[i] - b[i]) * (Ax[i] - b[i]);
    if (std::sqrt(rs) <= tol * (bnorm + anorm * detail::norm2(x))) return x;
    throw SolverError("cg_solve: no convergence after 50 restarts", std::sqrt(rs));
}

/// Field-level solve: restricts the rhs to the operator's unknowns and
/// extends the solution by zero on eliminated nodes.
inline Field cg_solve_field(const SparseOperator& A, const Field& b,
                            double tol = 1e-12, std::size_t max_iter = 100000,
                            bool diagonal_preconditioner = false) {
    return A.extend(cg_solve(A, A.restrict_field(b), tol, max_iter, diagonal_preconditioner));
}

/// Rayleigh quotient <A w, w>_W / <w, w>_W with trapezoidal weights.
inline double rayleigh_quotient(const SparseOperator& A, const Field& w) {
    std::vector<double> x = A.restrict_field(w);
    double nx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) nx += A.row_weight[i] * x[i] * x[i];
    if (nx == 0.0) throw DomainError("rayleigh_quotient: zero field");
    const std::vector<double> Sx = A.apply_weighted(x);
    double num = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) num += Sx[i] * x[i];
    return num / nx;
}

struct Eigenpair {
    double lambda1 = 0.0;
    Field phi1;
    double residual = 0.0;   // ||A phi1 - lambda1 phi1||_inf at exit
};

/// Smallest eigenpair of the Neumann operator by inverse power iteration
/// from the all-ones start. phi1 is normalized to max-norm 1 and positive.
inline Eigenpair smallest_eigenpair(const SparseOperator& A, double eig_tol = 1e-10,
                                    std::size_t max_iter = 200) {
    if (A.boundary != SparseOperator::Boundary::neumann)
        throw DomainError("smallest_eigenpair: expects the Neumann operator");
    const std::size_t n = A.rows;
    std::vector<double> x(n, 1.0);
    double lambda = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<double> y = cg_solve(A, x, std::min(eig_tol, 1e-12), 100000);
        double m = 0.0;
        for (double v : y) m = std::max(m, std::abs(v));
        if (m == 0.0) throw SolverError("smallest_eigenpair: iteration collapsed", lambda);
        for (double& v : y) v /= m;
        x = y;

        Field f(A.grid);
        f.values = x;
        lambda = rayleigh_quotient(A, f);
        const std::vector<double> Ax = A.apply(x);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            res = std::max(res, std::abs(Ax[i] - lambda * x[i]));
        if (res <= eig_tol) {
            Eigenpair e;
            e.lambda1 = lambda;
            e.phi1 = f;
            e.residual = res;
            for (double v : x)
                if (!(v > 0))
                    throw SolverError("smallest_eigenpair: eigenfunction not positive", lambda);
            return e;
        }
    }
    throw SolverError("smallest_eigenpair: no convergence, last Rayleigh quotient " +
                          std::to_string(lambda),
                      lambda);
}

} // namespace gm
