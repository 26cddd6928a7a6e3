#pragma once

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gm/barriers.hpp"
#include "gm/dense.hpp"
#include "gm/errors.hpp"
#include "gm/grid.hpp"
#include "gm/linalg.hpp"
#include "gm/sparse.hpp"

namespace gm {

enum class RegionLabel { interior, boundary, annulus, none };
enum class BoundaryClass { vanishing, positive, indeterminate };

inline const char* to_string(RegionLabel l) {
    switch (l) {
        case RegionLabel::interior: return "interior";
        case RegionLabel::boundary: return "boundary";
        case RegionLabel::annulus: return "annulus";
        default: return "none";
    }
}

inline const char* to_string(BoundaryClass c) {
    switch (c) {
        case BoundaryClass::vanishing: return "vanishing";
        case BoundaryClass::positive: return "positive";
        default: return "indeterminate";
    }
}

/// A candidate steady state with its bookkeeping.
struct SolutionPair {
    Field u, v;
    double residual_u = 0.0, residual_v = 0.0;
    RegionLabel box_label = RegionLabel::none;
    BoundaryClass boundary_class = BoundaryClass::indeterminate;

    double residual_max() const { return std::max(residual_u, residual_v); }
};

struct SolveReport {
    std::size_t iterations = 0;
    double residual_u = 0.0, residual_v = 0.0;
    bool converged = false;
    RegionLabel box_label = RegionLabel::none;
    BoundaryClass boundary_class = BoundaryClass::indeterminate;
    double wall_time_ms = 0.0;
    bool truncation_inactive = false;   // converged pair strictly inside the box
    SolutionPair pair;

    nlohmann::json to_json() const {
        return {{"iterations", iterations},
                {"residual_u", residual_u},
                {"residual_v", residual_v},
                {"converged", converged},
                {"box_label", gm::to_string(box_label)},
                {"boundary_class", gm::to_string(boundary_class)},
                {"wall_time_ms", wall_time_ms}};
    }
};

/// Nodewise clamp into [lower, upper].
inline Field truncate(const Field& f, const Field& lower, const Field& upper) {
    Field out = f;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (lower[i] > upper[i])
            throw DomainError("truncate: lower > upper at node " + std::to_string(i));
        out[i] = std::min(std::max(f[i], lower[i]), upper[i]);
    }
    return out;
}

/// The two reaction terms (u^a1/v^b1, u^a2/v^b2) with the floor rule.
inline std::pair<Field, Field> gm_rhs(const Field& u, const Field& v,
                                      const ExponentConfig& ex) {
    Field f1(u.grid), f2(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        f1[i] = power_ratio(u[i], ex.alpha1, v[i], ex.beta1);
        f2[i] = power_ratio(u[i], ex.alpha2, v[i], ex.beta2);
        if (!std::isfinite(f1[i]) || !std::isfinite(f2[i]))
            throw DomainError("gm_rhs: non-finite value at node " + std::to_string(i));
    }
    return {f1, f2};
}

/// Max-norm residuals of the discrete system under the given operator.
/// For the Dirichlet operator the residual additionally accounts for the
/// eliminated boundary values (a boundary-vanishing pair must be 0 there).
inline std::pair<double, double> residual(const Field& u, const Field& v,
                                          const ExponentConfig& ex,
                                          const SparseOperator& A) {
    const auto [f1, f2] = gm_rhs(u, v, ex);
    const std::vector<double> Au = A.apply(A.restrict_field(u));
    const std::vector<double> Av = A.apply(A.restrict_field(v));
    double ru = 0.0, rv = 0.0;
    for (std::size_t r = 0; r < A.rows; ++r) {
        ru = std::max(ru, std::abs(Au[r] - f1[A.node_of[r]]));
        rv = std::max(rv, std::abs(Av[r] - f2[A.node_of[r]]));
    }
    if (A.boundary == SparseOperator::Boundary::dirichlet) {
        for (std::size_t i = 0; i < u.size(); ++i)
            if (A.row_of[i] == SparseOperator::npos) {
                ru = std::max(ru, std::abs(u[i]));
                rv = std::max(rv, std::abs(v[i]));
            }
    }
    return {ru, rv};
}

/// Residual against the zero-flux discretization of the full system.
inline std::pair<double, double> residual(const Field& u, const Field& v,
                                          const ExponentConfig& ex) {
    return residual(u, v, ex, neumann_operator(u.grid));
}

// ---------------------------------------------------------------------------
// Generic damped Newton machinery
// ---------------------------------------------------------------------------

/// A square nonlinear system with a dense analytic Jacobian.
struct NewtonSystem {
    std::size_t size = 0;
    std::function<std::vector<double>(const std::vector<double>&)> residual;
    std::function<DenseMatrix(const std::vector<double>&)> jacobian;
};

struct NewtonResult {
    std::vector<double> w;
    double residual_inf = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
    bool singular_jacobian = false;
};

namespace detail {

inline double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace detail

/// Damped Newton with Armijo backtracking on the euclidean residual norm.
inline NewtonResult newton_solve(const NewtonSystem& sys, std::vector<double> w,
                                 double tol, std::size_t max_iter) {
    NewtonResult out;
    std::vector<double> F = sys.residual(w);
    double fn = detail::norm2(F);
    out.residual_inf = detail::inf_norm(F);
    if (out.residual_inf <= tol) {
        out.w = std::move(w);
        out.converged = true;
        return out;
    }
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<double> step;
        try {
            step = lu_solve(sys.jacobian(w), F);
        } catch (const DomainError&) {
            out.singular_jacobian = true;
            break;
        }
        // backtracking: w_new = w - s * step
        double s = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            std::vector<double> wn(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) wn[i] = w[i] - s * step[i];
            std::vector<double> Fn = sys.residual(wn);
            const double fnn = detail::norm2(Fn);
            if (std::isfinite(fnn) && fnn <= (1.0 - 1e-4 * s) * fn) {
                w = std::move(wn);
                F = std::move(Fn);
                fn = fnn;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        out.iterations = it + 1;
        if (!accepted) {
            out.line_search_failed = true;
            break;
        }
        out.residual_inf = detail::inf_norm(F);
        if (out.residual_inf <= tol) {
            out.converged = true;
            break;
        }
    }
    out.w = std::move(w);
    out.residual_inf = detail::inf_norm(sys.residual(out.w));
    return out;
}

/// Newton on the deflated residual G(w) = prod_i (1/||w-w_i||^2 + 1) F(w).
/// Reconvergence to a deflated root is impossible since G blows up there.
inline NewtonResult deflated_newton_solve(const NewtonSystem& sys,
                                          const std::vector<std::vector<double>>& known,
                                          std::vector<double> start, double tol,
                                          std::size_t max_iter) {
    NewtonSystem deflated;
    deflated.size = sys.size;
    deflated.residual = [&sys, &known](const std::vector<double>& w) {
        std::vector<double> F = sys.residual(w);
        double M = 1.0;
        for (const auto& wi : known) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i)
                d2 += (w[i] - wi[i]) * (w[i] - wi[i]);
            M *= (d2 > 0.0 ? 1.0 / d2 : 1e300) + 1.0;
        }
        for (double& f : F) f *= M;
        return F;
    };
    deflated.jacobian = [&sys, &known](const std::vector<double>& w) {
        const std::size_t n = w.size();
        std::vector<double> F = sys.residual(w);
        DenseMatrix J = sys.jacobian(w);
        double M = 1.0;
        std::vector<double> gradM(n, 0.0);   // accumulates M * sum grad(m_i)/m_i
        std::vector<double> ratio(n, 0.0);
        for (const auto& wi : known) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) d2 += (w[i] - wi[i]) * (w[i] - wi[i]);
            const double inv = d2 > 0.0 ? 1.0 / d2 : 1e300;
            const double mi = inv + 1.0;
            M *= mi;
            // grad m_i = -2 (w - wi) / d2^2
            const double coef = -2.0 * inv * inv / mi;
            for (std::size_t i = 0; i < n; ++i) ratio[i] += coef * (w[i] - wi[i]);
        }
        for (std::size_t i = 0; i < n; ++i) gradM[i] = M * ratio[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                J(i, j) = M * J(i, j) + F[i] * gradM[j];
        return J;
    };

    NewtonResult res = newton_solve(deflated, std::move(start), tol * 1e-3, max_iter);
    // Convergence is judged on the undeflated residual.
    res.residual_inf = detail::inf_norm(sys.residual(res.w));
    res.converged = res.residual_inf <= tol;
    return res;
}

// ---------------------------------------------------------------------------
// The coupled activator-inhibitor system as a NewtonSystem
// ---------------------------------------------------------------------------

namespace detail {

// Packs (u, v) restricted to the operator unknowns into one vector.
inline std::vector<double> pack(const SparseOperator& A, const Field& u, const Field& v) {
    std::vector<double> w(2 * A.rows);
    const std::vector<double> ur = A.restrict_field(u);
    const std::vector<double> vr = A.restrict_field(v);
    for (std::size_t i = 0; i < A.rows; ++i) {
        w[i] = ur[i];
        w[A.rows + i] = vr[i];
    }
    return w;
}

inline std::pair<Field, Field> unpack(const SparseOperator& A,
                                      const std::vector<double>& w) {
    std::vector<double> ur(A.rows), vr(A.rows);
    for (std::size_t i = 0; i < A.rows; ++i) {
        ur[i] = w[i];
        vr[i] = w[A.rows + i];
    }
    return {A.extend(ur), A.extend(vr)};
}

// d/du and d/dv of u^a / v^b with the floor rule (zero where clamped).
inline double d_ratio_du(double u, double a, double v, double b) {
    if (u <= 0.0) return 0.0;
    const double vf = v > kEpsFloor ? v : kEpsFloor;
    return a * std::pow(u, a - 1.0) / std::pow(vf, b);
}

inline double d_ratio_dv(double u, double a, double v, double b) {
    if (v <= kEpsFloor) return 0.0;
    const double uf = u > 0.0 ? u : 0.0;
    if (uf == 0.0) return 0.0;
    return -b * std::pow(uf, a) / std::pow(v, b + 1.0);
}

inline void add_operator_block(DenseMatrix& J, const SparseOperator& A,
                               std::size_t row0, std::size_t col0) {
    for (std::size_t r = 0; r < A.rows; ++r)
        for (std::size_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
            J(row0 + r, col0 + A.cols[k]) += A.vals[k];
}

} // namespace detail

/// F(u,v) = (A u - u^a1/v^b1, A v - u^a2/v^b2) over the operator unknowns.
/// The analytic Jacobian carries the four diagonal reaction blocks.
inline NewtonSystem make_gm_system(const SparseOperator& A, const ExponentConfig& ex) {
    NewtonSystem sys;
    const std::size_t m = A.rows;
    sys.size = 2 * m;
    sys.residual = [&A, ex, m](const std::vector<double>& w) {
        std::vector<double> ur(w.begin(), w.begin() + m);
        std::vector<double> vr(w.begin() + m, w.end());
        const std::vector<double> Au = A.apply(ur);
        const std::vector<double> Av = A.apply(vr);
        std::vector<double> F(2 * m);
        for (std::size_t i = 0; i < m; ++i) {
            F[i] = Au[i] - power_ratio(ur[i], ex.alpha1, vr[i], ex.beta1);
            F[m + i] = Av[i] - power_ratio(ur[i], ex.alpha2, vr[i], ex.beta2);
        }
        return F;
    };
    sys.jacobian = [&A, ex, m](const std::vector<double>& w) {
        DenseMatrix J(2 * m);
        detail::add_operator_block(J, A, 0, 0);
        detail::add_operator_block(J, A, m, m);
        for (std::size_t i = 0; i < m; ++i) {
            const double u = w[i], v = w[m + i];
            J(i, i) -= detail::d_ratio_du(u, ex.alpha1, v, ex.beta1);
            J(i, m + i) -= detail::d_ratio_dv(u, ex.alpha1, v, ex.beta1);
            J(m + i, i) -= detail::d_ratio_du(u, ex.alpha2, v, ex.beta2);
            J(m + i, m + i) -= detail::d_ratio_dv(u, ex.alpha2, v, ex.beta2);
        }
        return J;
    };
    return sys;
}

/// Damped Newton refinement of a candidate pair on the given operator.
inline SolveReport newton_refine(const Field& u0, const Field& v0,
                                 const ExponentConfig& ex, const SparseOperator& A,
                                 double tol = 1e-12, std::size_t max_iter = 50) {
    const auto t0 = std::chrono::steady_clock::now();
    const NewtonSystem sys = make_gm_system(A, ex);
    NewtonResult res = newton_solve(sys, detail::pack(A, u0, v0), tol, max_iter);

    SolveReport rep;
    rep.iterations = res.iterations;
    rep.converged = res.converged;
    auto [u, v] = detail::unpack(A, res.w);
    auto [ru, rv] = residual(u, v, ex, A);
    rep.residual_u = ru;
    rep.residual_v = rv;
    rep.pair.u = std::move(u);
    rep.pair.v = std::move(v);
    rep.pair.residual_u = ru;
    rep.pair.residual_v = rv;
    rep.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
}

/// The constructive truncation fixed-point scheme: each sweep solves the
/// linear problem with the nonlinearity frozen at the clamped iterate.
/// Interior boxes run against the Neumann operator, boundary boxes against
/// the Dirichlet operator (the sub/supersolution theorem holds for both
/// boundary conditions, and a boundary-vanishing pair only solves the
/// Dirichlet discretization).
inline SolveReport picard_solve_in_box(const BoxSpec& box, const ExponentConfig& ex,
                                       std::optional<std::pair<Field, Field>> start =
                                           std::nullopt,
                                       double tol = 1e-12, std::size_t max_iter = 500,
                                       double linear_tol = 1e-12) {
    const auto t0 = std::chrono::steady_clock::now();
    const GridPtr grid = box.lower_u.grid;
    const SparseOperator A = box.label == BoxLabel::interior ? neumann_operator(grid)
                                                             : dirichlet_operator(grid);
    Field u, v;
    if (start) {
        u = start->first;
        v = start->second;
    } else {
        u = Field(grid);
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] = 0.5 * (box.lower_u[i] + box.upper_u[i]);
        v = Field(grid);
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = 0.5 * (box.lower_v[i] + box.upper_v[i]);
    }

    SolveReport rep;
    rep.box_label =
        box.label == BoxLabel::interior ? RegionLabel::interior : RegionLabel::boundary;
    bool converged = false;
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        const Field tu = truncate(u, box.lower_u, box.upper_u);
        const Field tv = truncate(v, box.lower_v, box.upper_v);
        const auto [f1, f2] = gm_rhs(tu, tv, ex);
        Field un = cg_solve_field(A, f1, linear_tol);
        Field vn = cg_solve_field(A, f2, linear_tol);
        const double change =
            std::max(max_norm_distance(un, u), max_norm_distance(vn, v));
        u = std::move(un);
        v = std::move(vn);
        if (change <= tol) {
            converged = true;
            ++it;
            break;
        }
    }

    // Newton sharpening from the (possibly unconverged) Picard iterate.
    const SolveReport newton = newton_refine(u, v, ex, A, std::min(tol, 1e-12), 50);
    if (newton.converged) {
        u = newton.pair.u;
        v = newton.pair.v;
        converged = true;
    }

    rep.iterations = it;
    rep.converged = converged;
    auto [ru, rv] = residual(u, v, ex, A);
    rep.residual_u = ru;
    rep.residual_v = rv;

    // Re-check the truncation: inactive iff the pair lies inside the box.
    rep.truncation_inactive = true;
    const double slack = 1e-10;
    for (std::size_t i = 0; i < u.size() && rep.truncation_inactive; ++i) {
        if (u[i] < box.lower_u[i] - slack || u[i] > box.upper_u[i] + slack ||
            v[i] < box.lower_v[i] - slack || v[i] > box.upper_v[i] + slack)
            rep.truncation_inactive = false;
    }

    rep.pair.u = std::move(u);
    rep.pair.v = std::move(v);
    rep.pair.residual_u = ru;
    rep.pair.residual_v = rv;
    rep.pair.box_label = rep.box_label;
    rep.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
}

// ---------------------------------------------------------------------------
// Homotopy families and the nonexistence probes
// ---------------------------------------------------------------------------

enum class HomotopyFamily { abs_family, plus_family };

struct HomotopyConfig {
    HomotopyFamily family = HomotopyFamily::plus_family;
    double lambda = 0.5;                 // in (0, lambda1) = (0, 1)
    std::vector<double> t_schedule;      // default: 21 uniform steps
    std::size_t per_t_budget = 60;       // Newton iterations per t

    static std::vector<double> uniform_schedule(std::size_t steps = 21) {
        std::vector<double> t(steps);
        for (std::size_t i = 0; i < steps; ++i)
            t[i] = static_cast<double>(i) / static_cast<double>(steps - 1);
        return t;
    }
};

struct HomotopyBranch {
    std::vector<SolutionPair> branch;    // one accepted pair per completed t
    std::vector<double> t_values;
    bool complete = false;
    std::size_t failure_index = 0;       // first t index that lost the branch
};

namespace detail {

// Coupled homotopy residual at parameter t. The deformation term acts
// componentwise with the eigenfunction phi1.
inline NewtonSystem make_homotopy_system(const SparseOperator& A,
                                         const ExponentConfig& ex, HomotopyFamily fam,
                                         double lambda, double t, const Field& phi1) {
    NewtonSystem sys;
    const std::size_t m = A.rows;
    sys.size = 2 * m;
    std::vector<double> phi = A.restrict_field(phi1);

    auto deform = [fam](double s, double p) {
        if (fam == HomotopyFamily::plus_family) return s - p > 0.0 ? s - p : 0.0;
        const double sp = s > 0.0 ? s : 0.0;
        return std::abs(sp - p);
    };
    auto d_deform = [fam](double s, double p) {
        if (fam == HomotopyFamily::plus_family) return s - p > 0.0 ? 1.0 : 0.0;
        if (s <= 0.0) return 0.0;
        return s - p > 0.0 ? 1.0 : (s - p < 0.0 ? -1.0 : 0.0);
    };

    sys.residual = [&A, ex, lambda, t, fam, phi, deform, m](const std::vector<double>& w) {
        std::vector<double> ur(w.begin(), w.begin() + m);
        std::vector<double> vr(w.begin() + m, w.end());
        const std::vector<double> Au = A.apply(ur);
        const std::vector<double> Av = A.apply(vr);
        std::vector<double> F(2 * m);
        for (std::size_t i = 0; i < m; ++i) {
            const double g1 = t * power_ratio(ur[i], ex.alpha1, vr[i], ex.beta1) +
                              (1.0 - t) * lambda * deform(ur[i], phi[i]);
            const double g2 = t * power_ratio(ur[i], ex.alpha2, vr[i], ex.beta2) +
                              (1.0 - t) * lambda * deform(vr[i], phi[i]);
            F[i] = Au[i] - g1;
            F[m + i] = Av[i] - g2;
        }
        return F;
    };
    sys.jacobian = [&A, ex, lambda, t, fam, phi, d_deform, m](const std::vector<double>& w) {
        DenseMatrix J(2 * m);
        add_operator_block(J, A, 0, 0);
        add_operator_block(J, A, m, m);
        for (std::size_t i = 0; i < m; ++i) {
            const double u = w[i], v = w[m + i];
            J(i, i) -= t * d_ratio_du(u, ex.alpha1, v, ex.beta1) +
                       (1.0 - t) * lambda * d_deform(u, phi[i]);
            J(i, m + i) -= t * d_ratio_dv(u, ex.alpha1, v, ex.beta1);
            J(m + i, i) -= t * d_ratio_du(u, ex.alpha2, v, ex.beta2);
            J(m + i, m + i) -= t * d_ratio_dv(u, ex.alpha2, v, ex.beta2) +
                               (1.0 - t) * lambda * d_deform(v, phi[i]);
        }
        return J;
    };
    return sys;
}

} // namespace detail

/// Continuation over the t schedule. The plus family starts from the unique
/// trivial solution at t = 0 and walks forward; the abs family is a reverse
/// probe from a t = 1 solution down towards the (solution-free) t = 0 end.
inline HomotopyBranch homotopy_solve(const HomotopyConfig& cfg, const ExponentConfig& ex,
                                     const GridPtr& grid,
                                     std::optional<std::pair<Field, Field>> start =
                                         std::nullopt,
                                     double accept_tol = 1e-8) {
    if (!(cfg.lambda > 0.0 && cfg.lambda < 1.0))
        throw ConfigError("homotopy_solve: lambda must lie in (0, 1)");
    const SparseOperator A = neumann_operator(grid);
    const Eigenpair eig = smallest_eigenpair(A);

    std::vector<double> schedule =
        cfg.t_schedule.empty() ? HomotopyConfig::uniform_schedule() : cfg.t_schedule;
    const bool forward = cfg.family == HomotopyFamily::plus_family;
    if (!forward) {
        std::reverse(schedule.begin(), schedule.end());
    }

    HomotopyBranch out;
    out.complete = true;

    Field u(grid, 0.0), v(grid, 0.0);
    if (start) {
        u = start->first;
        v = start->second;
    } else if (!forward) {
        u = Field(grid, 1.0);
        v = Field(grid, 1.0);
    }

    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const double t = schedule[k];
        // A few frozen-nonlinearity sweeps pull the warm start into the
        // Newton basin; essential when leaving the trivial branch at t ~ 0.
        if (forward) {
            Field uw = u, vw = v;
            for (std::size_t i = 0; i < uw.size(); ++i) {
                uw[i] = std::max(uw[i], 1e-3);
                vw[i] = std::max(vw[i], 1e-3);
            }
            for (int sweep = 0; sweep < 30; ++sweep) {
                Field f1(grid), f2(grid);
                for (std::size_t i = 0; i < f1.size(); ++i) {
                    const double p = eig.phi1[i];
                    f1[i] = t * power_ratio(uw[i], ex.alpha1, vw[i], ex.beta1) +
                            (1.0 - t) * cfg.lambda * std::max(uw[i] - p, 0.0);
                    f2[i] = t * power_ratio(uw[i], ex.alpha2, vw[i], ex.beta2) +
                            (1.0 - t) * cfg.lambda * std::max(vw[i] - p, 0.0);
                }
                uw = cg_solve_field(A, f1, 1e-12);
                vw = cg_solve_field(A, f2, 1e-12);
            }
            u = uw;
            v = vw;
        }

        const NewtonSystem sys =
            detail::make_homotopy_system(A, ex, cfg.family, cfg.lambda, t, eig.phi1);
        NewtonResult res = newton_solve(sys, detail::pack(A, u, v),
                                        std::min(accept_tol * 1e-2, 1e-10),
                                        cfg.per_t_budget);
        if (!res.converged) {
            out.complete = false;
            out.failure_index = k;
            break;
        }
        auto [un, vn] = detail::unpack(A, res.w);
        u = un;
        v = vn;
        SolutionPair p;
        p.u = std::move(un);
        p.v = std::move(vn);
        // residual bookkeeping against (P) itself; only meaningful at t = 1
        auto [ru, rv] = residual(u, v, ex, A);
        p.residual_u = ru;
        p.residual_v = rv;
        out.branch.push_back(std::move(p));
        out.t_values.push_back(t);
    }
    return out;
}

struct NonexistenceReport {
    double residual_at_zero = 0.0;
    double residual_at_phi1 = 0.0;
    std::size_t n_starts = 0;
    std::size_t converged_roots = 0;
    double min_residual = std::numeric_limits<double>::infinity();

    nlohmann::json to_json() const {
        return {{"residual_at_zero", residual_at_zero},
                {"residual_at_phi1", residual_at_phi1},
                {"n_starts", n_starts},
                {"converged_roots", converged_roots},
                {"min_residual", min_residual}};
    }
};

/// Multistart probe of the scalar Neumann problem
/// (-Lap + I) u = lambda |u^+ - phi1|, which should have no discrete root.
inline NonexistenceReport check_l9_nonexistence(const GridPtr& grid, double lambda,
                                                std::size_t n_starts, double tol,
                                                std::uint64_t seed = 0,
                                                std::size_t max_iter = 80) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ConfigError("check_l9_nonexistence: lambda must lie in (0, 1)");
    const SparseOperator A = neumann_operator(grid);
    const Eigenpair eig = smallest_eigenpair(A);
    const std::vector<double> phi = A.restrict_field(eig.phi1);
    const std::size_t m = A.rows;

    NewtonSystem sys;
    sys.size = m;
    sys.residual = [&A, lambda, phi, m](const std::vector<double>& w) {
        std::vector<double> F = A.apply(w);
        for (std::size_t i = 0; i < m; ++i)
            F[i] -= lambda * std::abs(std::max(w[i], 0.0) - phi[i]);
        return F;
    };
    sys.jacobian = [&A, lambda, phi, m](const std::vector<double>& w) {
        DenseMatrix J(m);
        detail::add_operator_block(J, A, 0, 0);
        for (std::size_t i = 0; i < m; ++i) {
            if (w[i] <= 0.0) continue;
            const double d = w[i] - phi[i];
            J(i, i) -= lambda * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
        }
        return J;
    };

    NonexistenceReport rep;
    rep.n_starts = n_starts;
    rep.residual_at_zero = detail::inf_norm(sys.residual(std::vector<double>(m, 0.0)));
    rep.residual_at_phi1 = detail::inf_norm(sys.residual(phi));

    const double span = 2.0 * eig.phi1.max_abs();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-span, span);
    for (std::size_t s = 0; s < n_starts; ++s) {
        std::vector<double> w(m);
        for (double& x : w) x = dist(rng);
        NewtonResult res = newton_solve(sys, std::move(w), tol, max_iter);
        rep.min_residual = std::min(rep.min_residual, res.residual_inf);
        if (res.converged) ++rep.converged_roots;
    }
    return rep;
}

/// Multistart probe at t = 0 of the abs-family coupled homotopy, expected
/// to find nothing.
inline NonexistenceReport abs_family_t0_probe(const GridPtr& grid, double lambda,
                                              std::size_t n_starts, double tol,
                                              std::uint64_t seed = 0,
                                              std::size_t max_iter = 80) {
    const SparseOperator A = neumann_operator(grid);
    const Eigenpair eig = smallest_eigenpair(A);
    ExponentConfig ex(0.4, 0.2, 0.4, 0.2);   // inert at t = 0
    const NewtonSystem sys = detail::make_homotopy_system(
        A, ex, HomotopyFamily::abs_family, lambda, 0.0, eig.phi1);
    const std::size_t m = A.rows;

    NonexistenceReport rep;
    rep.n_starts = n_starts;
    rep.residual_at_zero = detail::inf_norm(sys.residual(std::vector<double>(2 * m, 0.0)));
    std::vector<double> wphi(2 * m);
    const std::vector<double> phi = A.restrict_field(eig.phi1);
    for (std::size_t i = 0; i < m; ++i) wphi[i] = wphi[m + i] = phi[i];
    rep.residual_at_phi1 = detail::inf_norm(sys.residual(wphi));

    const double span = 2.0 * eig.phi1.max_abs();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-span, span);
    for (std::size_t s = 0; s < n_starts; ++s) {
        std::vector<double> w(2 * m);
        for (double& x : w) x = dist(rng);
        NewtonResult res = newton_solve(sys, std::move(w), tol, max_iter);
        rep.min_residual = std::min(rep.min_residual, res.residual_inf);
        if (res.converged) ++rep.converged_roots;
    }
    return rep;
}

} // namespace gm
