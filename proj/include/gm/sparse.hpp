#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "gm/errors.hpp"
#include "gm/grid.hpp"

namespace gm {

/// Compressed-row operator for the discrete -Laplace + identity.
///
/// Rows are assembled in strong form, so the Neumann operator satisfies
/// A*1 = 1 with the textbook stencils (interior -1/h^2, 2/h^2 + 1, -1/h^2;
/// boundary rows couple the mirrored neighbor with -2/h^2). The strong-form
/// Neumann matrix is not entrywise symmetric at boundary rows; it becomes
/// symmetric under the trapezoidal row weights, W*A = (W*A)^T, and that
/// weighted form is what the CG and eigenvalue routines use.
struct SparseOperator {
    enum class Boundary { neumann, dirichlet };

    Boundary boundary = Boundary::neumann;
    GridPtr grid;
    std::size_t rows = 0;
    std::vector<std::size_t> row_ptr;   // size rows + 1
    std::vector<std::size_t> cols;      // sorted within each row
    std::vector<double> vals;
    std::vector<double> row_weight;     // quadrature weight per row
    std::vector<std::size_t> node_of;   // grid node index per row
    std::vector<std::size_t> row_of;    // grid node -> row, SIZE_MAX if eliminated

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    /// y = A x in strong form. Sequential accumulation order, reproducible.
    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != rows) throw DomainError("SparseOperator::apply: size mismatch");
        std::vector<double> y(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                s += vals[k] * x[cols[k]];
            y[r] = s;
        }
        return y;
    }

    /// y = W A x, the symmetric positive-definite form.
    std::vector<double> apply_weighted(const std::vector<double>& x) const {
        std::vector<double> y = apply(x);
        for (std::size_t r = 0; r < rows; ++r) y[r] *= row_weight[r];
        return y;
    }

    double entry(std::size_t r, std::size_t c) const {
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (cols[k] == c) return vals[k];
        return 0.0;
    }

    /// max |a_ij - a_ji| over stored entries.
    double symmetry_defect() const {
        double m = 0.0;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                m = std::max(m, std::abs(vals[k] - entry(cols[k], r)));
        return m;
    }

    /// max |w_i a_ij - w_j a_ji| over stored entries.
    double weighted_symmetry_defect() const {
        double m = 0.0;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                m = std::max(m, std::abs(row_weight[r] * vals[k] -
                                         row_weight[cols[k]] * entry(cols[k], r)));
        return m;
    }

    /// Grid-node vector -> operator unknown vector.
    std::vector<double> restrict_field(const Field& f) const {
        std::vector<double> x(rows);
        for (std::size_t r = 0; r < rows; ++r) x[r] = f[node_of[r]];
        return x;
    }

    /// Operator unknown vector -> full field, eliminated nodes set to zero.
    Field extend(const std::vector<double>& x) const {
        Field f(grid, 0.0);
        for (std::size_t r = 0; r < rows; ++r) f[node_of[r]] = x[r];
        return f;
    }
};

namespace detail {

struct StencilEntry {
    std::size_t col;
    double val;
};

// Collects the row of -Delta + I at grid node (ix, iy) with mirror Neumann
// closure. Entries come out sorted by column.
inline void stencil_row(const Grid& g, std::size_t ix, std::size_t iy,
                        std::vector<StencilEntry>& out) {
    out.clear();
    const double ih2x = 1.0 / (g.h[0] * g.h[0]);
    const double ih2y = g.dimension == 2 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
    const std::size_t id = g.index(ix, iy);
    double diag = 1.0 + 2.0 * ih2x + (g.dimension == 2 ? 2.0 * ih2y : 0.0);

    auto push = [&](std::size_t col, double v) { out.push_back({col, v}); };

    // x-axis neighbors (stride n[1] in 2D, 1 in 1D)
    const bool xlo = (ix == 0), xhi = (ix + 1 == g.n[0]);
    // y-axis neighbors (stride 1), 2D only
    const bool ylo = (iy == 0), yhi = g.dimension == 2 && (iy + 1 == g.n[1]);

    if (g.dimension == 2 && !ylo) push(g.index(ix, iy - 1), yhi ? -2.0 * ih2y : -ih2y);
    if (!xlo) push(g.index(ix - 1, iy), xhi ? -2.0 * ih2x : -ih2x);
    push(id, diag);
    if (!xhi) push(g.index(ix + 1, iy), xlo ? -2.0 * ih2x : -ih2x);
    if (g.dimension == 2 && !yhi) push(g.index(ix, iy + 1), ylo ? -2.0 * ih2y : -ih2y);

    // Sort by column (the y-minus entry follows x-minus in 2D index order).
    for (std::size_t i = 1; i < out.size(); ++i)
        for (std::size_t j = i; j > 0 && out[j].col < out[j - 1].col; --j)
            std::swap(out[j], out[j - 1]);
}

} // namespace detail

/// Discrete -Delta + I with zero-flux (mirror ghost node) boundary closure.
inline SparseOperator neumann_operator(const GridPtr& grid) {
    const Grid& g = *grid;
    SparseOperator A;
    A.boundary = SparseOperator::Boundary::neumann;
    A.grid = grid;
    A.rows = g.node_count();
    A.row_ptr.assign(A.rows + 1, 0);
    A.node_of.resize(A.rows);
    A.row_of.resize(A.rows);
    A.row_weight = g.weights;

    std::vector<detail::StencilEntry> row;
    A.row_ptr[0] = 0;
    for (std::size_t ix = 0; ix < g.n[0]; ++ix) {
        const std::size_t ny = g.dimension == 2 ? g.n[1] : 1;
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const std::size_t id = g.index(ix, iy);
            detail::stencil_row(g, ix, iy, row);
            for (const auto& e : row) {
                A.cols.push_back(e.col);
                A.vals.push_back(e.val);
            }
            A.row_ptr[id + 1] = A.cols.size();
            A.node_of[id] = id;
            A.row_of[id] = id;
        }
    }
    return A;
}

/// Discrete -Delta + I on interior nodes with zero boundary values eliminated.
inline SparseOperator dirichlet_operator(const GridPtr& grid) {
    const Grid& g = *grid;
    SparseOperator A;
    A.boundary = SparseOperator::Boundary::dirichlet;
    A.grid = grid;
    A.row_of.assign(g.node_count(), SparseOperator::npos);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (!g.boundary_mask[i]) {
            A.row_of[i] = A.node_of.size();
            A.node_of.push_back(i);
        }
    A.rows = A.node_of.size();
    if (A.rows == 0) throw ConfigError("dirichlet_operator: grid has no interior nodes");
    A.row_ptr.assign(A.rows + 1, 0);
    A.row_weight.resize(A.rows);

    const double ih2x = 1.0 / (g.h[0] * g.h[0]);
    const double ih2y = g.dimension == 2 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
    const double diag = 1.0 + 2.0 * ih2x + (g.dimension == 2 ? 2.0 * ih2y : 0.0);

    for (std::size_t r = 0; r < A.rows; ++r) {
        const std::size_t id = A.node_of[r];
        const std::size_t ix = g.dimension == 1 ? id : id / g.n[1];
        const std::size_t iy = g.dimension == 1 ? 0 : id % g.n[1];
        A.row_weight[r] = g.weights[id];
        auto push = [&](std::size_t node, double v) {
            const std::size_t c = A.row_of[node];
            if (c != SparseOperator::npos) {
                A.cols.push_back(c);
                A.vals.push_back(v);
            }
        };
        // Columns in ascending row order: y-1, x-1, diag, x+1, y+1 maps to
        // ascending interior indices because the node order is lexicographic.
        if (g.dimension == 2) push(g.index(ix, iy - 1), -ih2y);
        if (g.dimension == 2)
            push(g.index(ix - 1, iy), -ih2x);
        else
            push(id - 1, -ih2x);
        A.cols.push_back(r);
        A.vals.push_back(diag);
        if (g.dimension == 2)
            push(g.index(ix + 1, iy), -ih2x);
        else
            push(id + 1, -ih2x);
        if (g.dimension == 2) push(g.index(ix, iy + 1), -ih2y);
        A.row_ptr[r + 1] = A.cols.size();
    }
    return A;
}

} // namespace gm
