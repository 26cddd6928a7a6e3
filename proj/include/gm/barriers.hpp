#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "gm/errors.hpp"
#include "gm/grid.hpp"
#include "gm/linalg.hpp"
#include "gm/sparse.hpp"

namespace gm {

/// Floor used to regularize 0/0 ratios at exact boundary nodes.
inline constexpr double kEpsFloor = 1e-300;

/// u^a / v^b with the floor rule: negative u truncated to 0, v floored away
/// from zero. The true limit at the boundary is finite because a >= b.
inline double power_ratio(double u, double a, double v, double b) {
    const double uf = u > 0.0 ? u : 0.0;
    const double vf = v > kEpsFloor ? v : kEpsFloor;
    const double num = (a == 0.0) ? 1.0 : std::pow(uf, a);
    const double den = (b == 0.0) ? 1.0 : std::pow(vf, b);
    return num / den;
}

/// The four exponents of the activator-inhibitor nonlinearity.
struct ExponentConfig {
    double alpha1, beta1, alpha2, beta2;

    ExponentConfig(double a1, double b1, double a2, double b2)
        : alpha1(a1), beta1(b1), alpha2(a2), beta2(b2) {
        if (!valid(a1, b1) || !valid(a2, b2))
            throw ConfigError(
                "exponents must satisfy 0 < beta_i <= alpha_i and alpha_i + beta_i < 1 "
                "(got a1=" + std::to_string(a1) + " b1=" + std::to_string(b1) +
                " a2=" + std::to_string(a2) + " b2=" + std::to_string(b2) + ")");
    }

    static bool valid(double a, double b) {
        return a > 0.0 && b > 0.0 && a - b >= 0.0 && a + b < 1.0;
    }

    nlohmann::json to_json() const {
        return {{"alpha1", alpha1}, {"beta1", beta1}, {"alpha2", alpha2}, {"beta2", beta2}};
    }
};

/// Everything needed to build and check the two sub/supersolution boxes.
struct BarrierSet {
    Eigenpair eig;        // (lambda1, phi1), phi1 normalized to max-norm 1
    Field z;              // Neumann solve of (-Lap + I) z = 1
    Field y;              // Dirichlet solve of (-Lap + I) y = 1
    Field y_delta;        // Dirichlet solve with the +-1 band source
    double delta = 0.0;   // calibrated band width
    double mu_bar = 0.0;  // max phi1
    double mu_under = 0.0;// min phi1
    double c0 = 0.0;      // z >= c0 * mu_bar
    double c1 = 0.0;      // z <= c1 * phi1
    double c = 0.0;       // d/c <= y <= c*d on interior nodes
    double C_interior = 0.0;
    double C_boundary = 0.0;
};

enum class BoxLabel { interior, boundary };

inline const char* to_string(BoxLabel l) {
    return l == BoxLabel::interior ? "interior" : "boundary";
}

/// Ordered rectangle [lower, upper]^2 trapping one solution.
struct BoxSpec {
    Field lower_u, lower_v, upper_u, upper_v;
    BoxLabel label = BoxLabel::interior;
};

struct InequalityCheck {
    std::string inequality_id;
    double worst_slack = 0.0;
    std::size_t worst_node = 0;
    bool pass = false;

    nlohmann::json to_json() const {
        return {{"inequality_id", inequality_id},
                {"worst_slack", worst_slack},
                {"worst_node", worst_node},
                {"pass", pass}};
    }
};

struct CertificateReport {
    BoxLabel label = BoxLabel::interior;
    std::vector<InequalityCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks) arr.push_back(c.to_json());
        return {{"box", gm::to_string(label)}, {"inequalities", arr},
                {"pass", all_pass()}};
    }
};

inline Field compute_z(const GridPtr& grid, double tol = 1e-12) {
    const SparseOperator A = neumann_operator(grid);
    Field one(grid, 1.0);
    return cg_solve_field(A, one, tol);
}

inline Field compute_y(const GridPtr& grid, double tol = 1e-12) {
    const SparseOperator A = dirichlet_operator(grid);
    Field one(grid, 1.0);
    return cg_solve_field(A, one, tol);
}

inline Field compute_y_delta(const GridPtr& grid, double delta, double tol = 1e-12) {
    if (!(delta > 0.0) || !(delta < 0.5 * grid->min_extent()))
        throw ConfigError("compute_y_delta: delta must lie in (0, min_extent/2)");
    const SparseOperator A = dirichlet_operator(grid);
    Field f(grid);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = grid->dist[i] > delta ? 1.0 : -1.0;
    return cg_solve_field(A, f, tol);
}

/// Halves delta from min_extent/20 until y_delta >= y/2 holds at every node.
inline double calibrate_delta(const GridPtr& grid, const Field& y, double tol = 1e-12) {
    double delta = grid->min_extent() / 20.0;
    for (int attempt = 0; attempt < 20; ++attempt) {
        const Field yd = compute_y_delta(grid, delta, tol);
        bool ok = true;
        for (std::size_t i = 0; i < y.size() && ok; ++i)
            if (yd[i] < 0.5 * y[i]) ok = false;
        if (ok) return delta;
        delta *= 0.5;
    }
    throw CalibrationError("calibrate_delta: no delta satisfied y_delta >= y/2 "
                           "after 20 halvings");
}

/// Fills mu_bar, mu_under, c0, c1, c from the already computed fields.
inline void calibrate_constants(const GridPtr& grid, BarrierSet& bs) {
    const Field& phi = bs.eig.phi1;
    bs.mu_bar = phi.max_value();
    bs.mu_under = phi.min_value();

    double zmin = bs.z.min_value();
    bs.c0 = std::min(zmin / bs.mu_bar, 1.0 - 1e-12);
    if (!(bs.c0 > 0.0)) throw CalibrationError("calibrate_constants: c0 not in (0,1)");

    double c1 = 0.0;
    for (std::size_t i = 0; i < bs.z.size(); ++i) c1 = std::max(c1, bs.z[i] / phi[i]);
    bs.c1 = c1;

    double c = 1.0 + 1e-9;
    bool have_interior = false;
    for (std::size_t i = 0; i < bs.y.size(); ++i) {
        if (grid->boundary_mask[i]) continue;
        have_interior = true;
        const double d = grid->dist[i];
        c = std::max(c, std::max(d / bs.y[i], bs.y[i] / d));
    }
    if (!have_interior) throw ConfigError("calibrate_constants: grid has no interior nodes");
    bs.c = c;
}

namespace detail {

inline double pow_or_one(double x, double e) { return e == 0.0 ? 1.0 : std::pow(x, e); }

} // namespace detail

/// Smallest power of two C >= 2 making the interior-box chain of
/// inequalities hold simultaneously.
inline double calibrate_C_interior(const ExponentConfig& ex, const BarrierSet& bs) {
    using detail::pow_or_one;
    const double a1 = ex.alpha1, b1 = ex.beta1, a2 = ex.alpha2, b2 = ex.beta2;
    const double l1 = bs.eig.lambda1, c1 = bs.c1, mb = bs.mu_bar, mu = bs.mu_under;
    std::string last_violation;
    for (double C = 2.0; C <= 1.8446744073709552e19; C *= 2.0) {  // up to 2^64
        if (!(C >= std::pow(C, a1 + b1) * std::pow(c1, a1) * pow_or_one(mb, a1 - b1))) {
            last_violation = "supersolution bound for component 1";
            continue;
        }
        if (!(C >= pow_or_one(C * c1 * mb, a2 - b2))) {
            last_violation = "supersolution bound for component 2";
            continue;
        }
        if (!(std::pow(C, a1 + b1 - 1.0) * l1 * std::pow(c1, b1) * mb *
                  pow_or_one(mu, b1 - a1) <=
              1.0)) {
            last_violation = "subsolution bound for component 1";
            continue;
        }
        if (!(l1 * mb / C <= pow_or_one(mu / C, a2 - b2))) {
            last_violation = "subsolution bound for component 2";
            continue;
        }
        return C;
    }
    throw CalibrationError("calibrate_C_interior: no C <= 2^64 satisfies the " +
                           last_violation);
}

/// Smallest power of two C >= 2 for the boundary box: the supersolution
/// max-bound plus the band inequality with d(x) replaced by its grid
/// minimum over the region outside the delta band.
inline double calibrate_C_boundary(const ExponentConfig& ex, const BarrierSet& bs,
                                   const GridPtr& grid) {
    using detail::pow_or_one;
    const double a1 = ex.alpha1, b1 = ex.beta1, a2 = ex.alpha2, b2 = ex.beta2;
    const double c = bs.c, delta = bs.delta, diam = grid->diameter();

    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid->dist.size(); ++i)
        if (grid->dist[i] > delta) dmin = std::min(dmin, grid->dist[i]);
    if (!std::isfinite(dmin))
        throw CalibrationError("calibrate_C_boundary: no nodes outside the delta band");

    std::string last_violation;
    for (double C = 2.0; C <= 1.8446744073709552e19; C *= 2.0) {
        if (!(C > pow_or_one(C * c * diam, b1 - a1))) {
            last_violation = "supersolution bound for component 1";
            continue;
        }
        if (!(C > std::pow(C * c, b2 + a2) * std::pow(2.0, a2) *
                  pow_or_one(diam, b2 - a2))) {
            last_violation = "supersolution bound for component 2";
            continue;
        }
        const double band1 = pow_or_one(dmin / (2.0 * c * C), b1 - a1);
        const double band2 =
            pow_or_one(dmin, b2 - a2) / (std::pow(2.0, b2) * std::pow(C * c, b2 + a2));
        if (!(std::min(band1, band2) > 1.0 / C)) {
            last_violation = "subsolution band inequality";
            continue;
        }
        return C;
    }
    throw CalibrationError("calibrate_C_boundary: no C <= 2^64 satisfies the " +
                           last_violation);
}

/// Builds the interior box [C^-1 phi1, C z]^2 and the boundary box
/// [max(C^-1 y_delta, 0), C y]^2 from a calibrated barrier set.
inline std::pair<BoxSpec, BoxSpec> make_boxes(const BarrierSet& bs) {
    const GridPtr grid = bs.z.grid;
    BoxSpec interior, boundary;
    interior.label = BoxLabel::interior;
    boundary.label = BoxLabel::boundary;

    interior.lower_u = Field(grid);
    interior.upper_u = Field(grid);
    for (std::size_t i = 0; i < grid->node_count(); ++i) {
        interior.lower_u[i] = bs.eig.phi1[i] / bs.C_interior;
        interior.upper_u[i] = bs.C_interior * bs.z[i];
        if (interior.lower_u[i] > interior.upper_u[i])
            throw CalibrationError("make_boxes: interior box ordering violated at node " +
                                   std::to_string(i));
    }
    interior.lower_v = interior.lower_u;
    interior.upper_v = interior.upper_u;

    boundary.lower_u = Field(grid);
    boundary.upper_u = Field(grid);
    for (std::size_t i = 0; i < grid->node_count(); ++i) {
        boundary.lower_u[i] = std::max(bs.y_delta[i] / bs.C_boundary, 0.0);
        boundary.upper_u[i] = bs.C_boundary * bs.y[i];
        if (boundary.lower_u[i] > boundary.upper_u[i])
            throw CalibrationError("make_boxes: boundary box ordering violated at node " +
                                   std::to_string(i));
    }
    boundary.lower_v = boundary.lower_u;
    boundary.upper_v = boundary.upper_u;
    return {interior, boundary};
}

/// Pointwise differential-inequality certificate for a box. The quantifier
/// over the box is removed by monotonicity: the subsolution tests take the
/// opposite component at its extreme where the ratio is worst, likewise for
/// the supersolution tests. Interior-labeled boxes are checked at every node
/// against the Neumann operator, boundary-labeled boxes on interior nodes
/// against the Dirichlet operator.
inline CertificateReport verify_subsuper(const BoxSpec& box, const ExponentConfig& ex) {
    const GridPtr grid = box.lower_u.grid;
    const SparseOperator A = box.label == BoxLabel::interior ? neumann_operator(grid)
                                                             : dirichlet_operator(grid);
    for (std::size_t r = 0; r < A.rows; ++r) {
        const std::size_t i = A.node_of[r];
        const bool at_boundary = grid->boundary_mask[i];
        if (!at_boundary && !(box.lower_u[i] > 0.0 && box.lower_v[i] > 0.0))
            throw DomainError("verify_subsuper: box not positive at interior node " +
                              std::to_string(i));
    }

    const std::vector<double> Alu = A.apply(A.restrict_field(box.lower_u));
    const std::vector<double> Alv = A.apply(A.restrict_field(box.lower_v));
    const std::vector<double> Auu = A.apply(A.restrict_field(box.upper_u));
    const std::vector<double> Auv = A.apply(A.restrict_field(box.upper_v));

    CertificateReport rep;
    rep.label = box.label;
    auto scan = [&](const std::string& id, auto slack_at) {
        InequalityCheck chk;
        chk.inequality_id = id;
        chk.worst_slack = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < A.rows; ++r) {
            const double s = slack_at(r);
            if (s < chk.worst_slack) {
                chk.worst_slack = s;
                chk.worst_node = A.node_of[r];
            }
        }
        chk.pass = chk.worst_slack >= -1e-12;
        rep.checks.push_back(chk);
    };

    // subsolution, component 1: A(l_u) <= l_u^a1 / v^b1, worst v = upper_v
    scan("sub_u", [&](std::size_t r) {
        const std::size_t i = A.node_of[r];
        return power_ratio(box.lower_u[i], ex.alpha1, box.upper_v[i], ex.beta1) - Alu[r];
    });
    // subsolution, component 2: A(l_v) <= u^a2 / l_v^b2, worst u = lower_u
    scan("sub_v", [&](std::size_t r) {
        const std::size_t i = A.node_of[r];
        return power_ratio(box.lower_u[i], ex.alpha2, box.lower_v[i], ex.beta2) - Alv[r];
    });
    // supersolution, component 1: A(u_u) >= u_u^a1 / v^b1, worst v = lower_v
    scan("sup_u", [&](std::size_t r) {
        const std::size_t i = A.node_of[r];
        return Auu[r] - power_ratio(box.upper_u[i], ex.alpha1, box.lower_v[i], ex.beta1);
    });
    // supersolution, component 2: A(u_v) >= u^a2 / u_v^b2, worst u = upper_u
    scan("sup_v", [&](std::size_t r) {
        const std::size_t i = A.node_of[r];
        return Auv[r] - power_ratio(box.upper_u[i], ex.alpha2, box.upper_v[i], ex.beta2);
    });
    return rep;
}

/// Full barrier pipeline for a grid: eigenpair, z, y, delta, y_delta,
/// constants and both box constants.
inline BarrierSet build_barriers(const GridPtr& grid, const ExponentConfig& ex,
                                 double tol = 1e-12, double eig_tol = 1e-10) {
    BarrierSet bs;
    const SparseOperator A = neumann_operator(grid);
    bs.eig = smallest_eigenpair(A, eig_tol);
    bs.z = compute_z(grid, tol);
    bs.y = compute_y(grid, tol);
    bs.delta = calibrate_delta(grid, bs.y, tol);
    bs.y_delta = compute_y_delta(grid, bs.delta, tol);
    calibrate_constants(grid, bs);
    bs.C_interior = calibrate_C_interior(ex, bs);
    bs.C_boundary = calibrate_C_boundary(ex, bs, grid);

    // The closed-form bounds above use worst-case constants; sharpen each C
    // against the discrete certificate itself. Both sides of every inequality
    // loosen as C grows (alpha_i + beta_i < 1), so doubling terminates.
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto [interior, boundary] = make_boxes(bs);
        const bool iok = verify_subsuper(interior, ex).all_pass();
        const bool bok = verify_subsuper(boundary, ex).all_pass();
        if (iok && bok) return bs;
        if (!iok) bs.C_interior *= 2.0;
        if (!bok) bs.C_boundary *= 2.0;
    }
    throw CalibrationError(
        "build_barriers: certificate still fails after doubling C to 2^64");
}

} // namespace gm
