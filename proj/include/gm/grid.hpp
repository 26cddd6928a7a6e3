#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <cstddef>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "gm/errors.hpp"

namespace gm {

/// Uniform tensor-product grid on an interval or an axis-aligned rectangle.
///
/// Node order is lexicographic in the coordinates: for 2D, node index
/// id = ix * n[1] + iy, so iterating ids walks x-major, then y. All exports
/// (CSV rows) follow this order.
struct Grid {
    int dimension = 1;                         // 1 or 2
    std::array<std::pair<double, double>, 2> extents{};
    std::array<std::size_t, 2> n{};            // nodes per axis; n[1] = 1 in 1D
    std::array<double, 2> h{};                 // spacing per axis; h[1] = 0 in 1D
    std::vector<bool> boundary_mask;           // true on boundary nodes
    std::vector<double> dist;                  // exact distance to the boundary
    std::vector<double> weights;               // trapezoidal quadrature weights

    std::size_t node_count() const { return dimension == 1 ? n[0] : n[0] * n[1]; }

    std::size_t index(std::size_t ix, std::size_t iy = 0) const {
        return dimension == 1 ? ix : ix * n[1] + iy;
    }

    double coord(std::size_t i, int axis) const {
        const std::size_t k = (axis == 0) ? (dimension == 1 ? i : i / n[1]) : i % n[1];
        return extents[axis].first + static_cast<double>(k) * h[axis];
    }

    /// Shortest domain extent, used as the reference length for delta bands.
    double min_extent() const {
        double m = extents[0].second - extents[0].first;
        if (dimension == 2) m = std::min(m, extents[1].second - extents[1].first);
        return m;
    }

    /// Diameter bound used where the analysis bounds d(x) by the domain size.
    double diameter() const {
        const double dx = extents[0].second - extents[0].first;
        if (dimension == 1) return dx;
        const double dy = extents[1].second - extents[1].first;
        return std::sqrt(dx * dx + dy * dy);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["dimension"] = dimension;
        j["extents"] = nlohmann::json::array();
        for (int a = 0; a < dimension; ++a)
            j["extents"].push_back({extents[a].first, extents[a].second});
        j["n"] = nlohmann::json::array();
        for (int a = 0; a < dimension; ++a) j["n"].push_back(n[a]);
        return j;
    }
};

using GridPtr = std::shared_ptr<const Grid>;

/// Scalar field sampled at the grid nodes.
struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(GridPtr g, double fill = 0.0)
        : grid(std::move(g)), values(grid->node_count(), fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    double min_value() const {
        double m = values.empty() ? 0.0 : values[0];
        for (double v : values) m = std::min(m, v);
        return m;
    }

    double max_value() const {
        double m = values.empty() ? 0.0 : values[0];
        for (double v : values) m = std::max(m, v);
        return m;
    }
};

inline GridPtr build_grid(int dimension,
                          const std::vector<std::pair<double, double>>& extents,
                          const std::vector<std::size_t>& n) {
    if (dimension != 1 && dimension != 2)
        throw ConfigError("build_grid: dimension must be 1 or 2");
    if (extents.size() != static_cast<std::size_t>(dimension) ||
        n.size() != static_cast<std::size_t>(dimension))
        throw ConfigError("build_grid: extents/n must have one entry per axis");
    for (int a = 0; a < dimension; ++a) {
        if (n[a] < 3)
            throw ConfigError("build_grid: need at least 3 nodes per axis, got " +
                              std::to_string(n[a]));
        if (!(extents[a].first < extents[a].second))
            throw ConfigError("build_grid: degenerate extent on axis " + std::to_string(a));
    }

    auto g = std::make_shared<Grid>();
    g->dimension = dimension;
    g->n = {n[0], dimension == 2 ? n[1] : 1};
    g->extents[0] = extents[0];
    if (dimension == 2) g->extents[1] = extents[1];
    g->h[0] = (extents[0].second - extents[0].first) / static_cast<double>(n[0] - 1);
    g->h[1] = dimension == 2
                  ? (extents[1].second - extents[1].first) / static_cast<double>(n[1] - 1)
                  : 0.0;

    const std::size_t total = g->node_count();
    g->boundary_mask.resize(total);
    g->dist.resize(total);
    g->weights.resize(total);

    auto axis_weight = [&](std::size_t k, int a) {
        return (k == 0 || k + 1 == g->n[a]) ? 0.5 * g->h[a] : g->h[a];
    };

    for (std::size_t ix = 0; ix < g->n[0]; ++ix) {
        const double x = g->extents[0].first + static_cast<double>(ix) * g->h[0];
        const double dx = std::min(x - g->extents[0].first, g->extents[0].second - x);
        if (dimension == 1) {
            const bool bnd = (ix == 0 || ix + 1 == g->n[0]);
            g->boundary_mask[ix] = bnd;
            g->dist[ix] = bnd ? 0.0 : dx;
            g->weights[ix] = axis_weight(ix, 0);
        } else {
            for (std::size_t iy = 0; iy < g->n[1]; ++iy) {
                const double y = g->extents[1].first + static_cast<double>(iy) * g->h[1];
                const double dy = std::min(y - g->extents[1].first, g->extents[1].second - y);
                const bool bnd = (ix == 0 || ix + 1 == g->n[0] || iy == 0 || iy + 1 == g->n[1]);
                const std::size_t id = g->index(ix, iy);
                g->boundary_mask[id] = bnd;
                g->dist[id] = bnd ? 0.0 : std::min(dx, dy);
                g->weights[id] = axis_weight(ix, 0) * axis_weight(iy, 1);
            }
        }
    }
    return g;
}

/// Max of |value| over boundary nodes.
inline double boundary_trace_max(const Field& f) {
    const Grid& g = *f.grid;
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (g.boundary_mask[i]) m = std::max(m, std::abs(f[i]));
    return m;
}

/// Min of the signed value over boundary nodes.
inline double boundary_trace_min(const Field& f) {
    const Grid& g = *f.grid;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i)
        if (g.boundary_mask[i]) m = std::min(m, f[i]);
    return m;
}

inline double max_norm_distance(const Field& a, const Field& b) {
    if (a.size() != b.size()) throw DomainError("max_norm_distance: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Discrete C1 norm: max |value| plus max one-sided difference quotient.
inline double c1_norm(const Field& f) {
    const Grid& g = *f.grid;
    double vmax = f.max_abs();
    double dmax = 0.0;
    if (g.dimension == 1) {
        for (std::size_t i = 0; i + 1 < g.n[0]; ++i)
            dmax = std::max(dmax, std::abs(f[i + 1] - f[i]) / g.h[0]);
    } else {
        for (std::size_t ix = 0; ix < g.n[0]; ++ix)
            for (std::size_t iy = 0; iy < g.n[1]; ++iy) {
                const std::size_t id = g.index(ix, iy);
                if (ix + 1 < g.n[0])
                    dmax = std::max(dmax,
                                    std::abs(f[g.index(ix + 1, iy)] - f[id]) / g.h[0]);
                if (iy + 1 < g.n[1])
                    dmax = std::max(dmax,
                                    std::abs(f[g.index(ix, iy + 1)] - f[id]) / g.h[1]);
            }
    }
    return vmax + dmax;
}

/// Writes `x[,y],value` rows in lexicographic node order.
inline void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    const Grid& g = *f.grid;
    out.precision(17);
    out << (g.dimension == 1 ? "x,value\n" : "x,y,value\n");
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << g.coord(i, 0);
        if (g.dimension == 2) out << ',' << g.coord(i, 1);
        out << ',' << f[i] << '\n';
    }
}

} // namespace gm
