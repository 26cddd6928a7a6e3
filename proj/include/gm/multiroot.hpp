#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gm/barriers.hpp"
#include "gm/errors.hpp"
#include "gm/grid.hpp"
#include "gm/solver.hpp"

namespace gm {

/// Max-norm balls used to confine the multistart search. The outer radius
/// dominates the scaled barrier fields, so every trapped solution lies well
/// inside; the second ball leaves room for a further, larger solution.
struct SearchRegions {
    double l2 = 0.0;   // > C * max of the C1 norms of the barrier fields
    double l1 = 0.0;   // = 4 * l2
};

inline SearchRegions make_search_regions(const BarrierSet& bs) {
    const double cmax = std::max(bs.C_interior, bs.C_boundary);
    SearchRegions r;
    r.l2 = 1.125 * cmax * std::max(c1_norm(bs.z), c1_norm(bs.y));
    r.l1 = 4.0 * r.l2;
    return r;
}

/// Distance between candidate pairs: max over both components of the
/// nodewise max-norm distance.
inline double pair_distance(const SolutionPair& a, const SolutionPair& b) {
    return std::max(max_norm_distance(a.u, b.u), max_norm_distance(a.v, b.v));
}

inline std::vector<std::vector<double>> pairwise_distance_matrix(
    const std::vector<SolutionPair>& sols) {
    const std::size_t n = sols.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i][j] = d[j][i] = pair_distance(sols[i], sols[j]);
    return d;
}

/// Labels how a pair behaves at the boundary nodes.
inline BoundaryClass classify_boundary(const SolutionPair& p, const BarrierSet& bs,
                                       double accept_tol) {
    const double trace = std::max(boundary_trace_max(p.u), boundary_trace_max(p.v));
    if (trace <= 10.0 * accept_tol) return BoundaryClass::vanishing;

    double phi_bnd_min = std::numeric_limits<double>::infinity();
    const Grid& g = *p.u.grid;
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (g.boundary_mask[i]) phi_bnd_min = std::min(phi_bnd_min, bs.eig.phi1[i]);
    const double floor = 0.5 * phi_bnd_min / bs.C_interior;
    const double trace_min = std::min(boundary_trace_min(p.u), boundary_trace_min(p.v));
    if (trace_min >= floor) return BoundaryClass::positive;
    return BoundaryClass::indeterminate;
}

/// One multistart attempt in the third-solution search.
struct SearchAttempt {
    std::string start;          // human-readable start description
    std::string system;         // "neumann" or "dirichlet"
    std::size_t iterations = 0;
    double residual = 0.0;
    double min_distance_to_known = 0.0;
    bool converged = false;
    bool accepted = false;      // converged, distinct, and inside the ball

    nlohmann::json to_json() const {
        return {{"start", start},
                {"system", system},
                {"iterations", iterations},
                {"residual", residual},
                {"min_distance_to_known", min_distance_to_known},
                {"converged", converged},
                {"accepted", accepted}};
    }
};

struct MultiRootResult {
    std::vector<SolutionPair> solutions;       // in discovery order
    std::vector<std::vector<double>> distances;
    SolveReport interior_report, boundary_report;
    CertificateReport interior_certificate, boundary_certificate;
    SearchRegions regions;
    std::vector<SearchAttempt> search_log;
    bool third_found = false;
    bool search_complete = false;              // full budget exhausted

    std::size_t n_found() const { return solutions.size(); }

    nlohmann::json to_json() const {
        nlohmann::json log = nlohmann::json::array();
        for (const auto& a : search_log) log.push_back(a.to_json());
        nlohmann::json sols = nlohmann::json::array();
        for (const auto& s : solutions)
            sols.push_back({{"residual_u", s.residual_u},
                            {"residual_v", s.residual_v},
                            {"box_label", gm::to_string(s.box_label)},
                            {"boundary_class", gm::to_string(s.boundary_class)},
                            {"u_min", s.u.min_value()},
                            {"u_max", s.u.max_value()},
                            {"v_min", s.v.min_value()},
                            {"v_max", s.v.max_value()}});
        return {{"n_found", n_found()},
                {"third_found", third_found},
                {"search_complete", search_complete},
                {"solutions", sols},
                {"pairwise_distances", distances},
                {"interior_report", interior_report.to_json()},
                {"boundary_report", boundary_report.to_json()},
                {"interior_certificate", interior_certificate.to_json()},
                {"boundary_certificate", boundary_certificate.to_json()},
                {"search_radius_inner", regions.l2},
                {"search_radius_outer", regions.l1},
                {"search_log", log}};
    }
};

namespace detail {

// Runs deflated Newton from one start and appends the attempt to the log.
// Returns the accepted pair, if any.
inline std::optional<SolutionPair> try_deflated_start(
    const NewtonSystem& sys, const SparseOperator& A, const ExponentConfig& ex,
    const std::vector<std::vector<double>>& known, std::vector<double> start,
    const std::string& start_desc, const SearchRegions& regions, double accept_tol,
    std::size_t max_iter, std::vector<SearchAttempt>& log) {
    SearchAttempt att;
    att.start = start_desc;
    att.system =
        A.boundary == SparseOperator::Boundary::neumann ? "neumann" : "dirichlet";

    NewtonResult res =
        deflated_newton_solve(sys, known, std::move(start), accept_tol, max_iter);
    att.iterations = res.iterations;
    att.residual = res.residual_inf;
    att.converged = res.converged;

    double mind = std::numeric_limits<double>::infinity();
    for (const auto& wi : known) {
        double m = 0.0;
        for (std::size_t i = 0; i < res.w.size(); ++i)
            m = std::max(m, std::abs(res.w[i] - wi[i]));
        mind = std::min(mind, m);
    }
    att.min_distance_to_known = mind;

    std::optional<SolutionPair> out;
    if (res.converged && mind >= 0.05) {
        auto [u, v] = unpack(A, res.w);
        const bool inside = std::max(u.max_abs(), v.max_abs()) <= regions.l1;
        const bool positive = u.min_value() >= -accept_tol && v.min_value() >= -accept_tol;
        if (inside && positive) {
            att.accepted = true;
            SolutionPair p;
            auto [ru, rv] = residual(u, v, ex, A);
            p.u = std::move(u);
            p.v = std::move(v);
            p.residual_u = ru;
            p.residual_v = rv;
            p.box_label = RegionLabel::annulus;
            out = std::move(p);
        }
    }
    log.push_back(std::move(att));
    return out;
}

} // namespace detail

/// The full pipeline: barriers, both trapped solutions, distinctness, and a
/// budgeted deflated multistart search for a further solution between and
/// beyond the two boxes. Deterministic for a fixed seed.
inline MultiRootResult find_three_solutions(const GridPtr& grid, const ExponentConfig& ex,
                                            std::uint64_t seed = 7,
                                            std::size_t budget = 200,
                                            double accept_tol = 1e-8) {
    MultiRootResult out;

    const BarrierSet bs = build_barriers(grid, ex);
    const auto [interior_box, boundary_box] = make_boxes(bs);
    out.interior_certificate = verify_subsuper(interior_box, ex);
    out.boundary_certificate = verify_subsuper(boundary_box, ex);
    if (!out.interior_certificate.all_pass() || !out.boundary_certificate.all_pass())
        throw CalibrationError("find_three_solutions: a box certificate failed");
    out.regions = make_search_regions(bs);

    out.interior_report = picard_solve_in_box(interior_box, ex, std::nullopt, accept_tol);
    out.boundary_report = picard_solve_in_box(boundary_box, ex, std::nullopt, accept_tol);
    if (!out.interior_report.converged || !out.boundary_report.converged)
        throw SolverError("find_three_solutions: a box solve did not converge",
                          std::max(out.interior_report.residual_u,
                                   out.boundary_report.residual_u));

    SolutionPair sol1 = out.interior_report.pair;
    sol1.boundary_class = classify_boundary(sol1, bs, accept_tol);
    out.interior_report.boundary_class = sol1.boundary_class;
    SolutionPair sol2 = out.boundary_report.pair;
    sol2.boundary_class = classify_boundary(sol2, bs, accept_tol);
    out.boundary_report.boundary_class = sol2.boundary_class;
    out.solutions.push_back(std::move(sol1));
    out.solutions.push_back(std::move(sol2));

    // --- third-solution search: deflated Newton on both discretizations ---
    const SparseOperator An = neumann_operator(grid);
    const SparseOperator Ad = dirichlet_operator(grid);
    const NewtonSystem sys_n = make_gm_system(An, ex);
    const NewtonSystem sys_d = make_gm_system(Ad, ex);

    const std::vector<double> zero_n(2 * An.rows, 0.0);
    const std::vector<double> zero_d(2 * Ad.rows, 0.0);
    std::vector<std::vector<double>> known_n{
        detail::pack(An, out.solutions[0].u, out.solutions[0].v), zero_n};
    std::vector<std::vector<double>> known_d{
        detail::pack(Ad, out.solutions[1].u, out.solutions[1].v), zero_d};
    // The interior solution also solves the Dirichlet rows away from the
    // boundary only approximately, but deflating its restriction costs
    // nothing and avoids rediscovering a near-copy.
    known_d.push_back(detail::pack(Ad, out.solutions[0].u, out.solutions[0].v));
    known_n.push_back(detail::pack(An, out.solutions[1].u, out.solutions[1].v));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> bump(-0.5, 0.5);
    const std::size_t per_start_iters = 40;
    std::size_t used = 0;

    auto run_start = [&](const SparseOperator& A, const NewtonSystem& sys,
                         const std::vector<std::vector<double>>& known,
                         std::vector<double> w, const std::string& desc) {
        if (out.third_found || used >= budget) return;
        const std::size_t iters = std::min(per_start_iters, budget - used);
        auto found = detail::try_deflated_start(sys, A, ex, known, std::move(w), desc,
                                                out.regions, accept_tol, iters,
                                                out.search_log);
        used += out.search_log.back().iterations;
        if (found) {
            found->boundary_class = classify_boundary(*found, bs, accept_tol);
            out.solutions.push_back(std::move(*found));
            out.third_found = true;
        }
    };

    // Scaled copies of the trapped solutions probe the annulus between the
    // inner ball and the outer one; random bumps break symmetry.
    for (double s : {1.5, 2.0, 3.0}) {
        std::vector<double> w = known_n[0];
        for (double& x : w) x *= s;
        run_start(An, sys_n, known_n, std::move(w),
                  "interior solution scaled by " + std::to_string(s));
    }
    for (double s : {1.5, 2.0, 3.0}) {
        std::vector<double> w = known_d[0];
        for (double& x : w) x *= s;
        run_start(Ad, sys_d, known_d, std::move(w),
                  "boundary solution scaled by " + std::to_string(s));
    }
    // Secondary probe: the endpoint of a forward homotopy branch can land on
    // a root the deflated multistarts miss.
    if (!out.third_found && used < budget) {
        HomotopyConfig hc;
        hc.family = HomotopyFamily::plus_family;
        HomotopyBranch br = homotopy_solve(hc, ex, grid);
        SearchAttempt att;
        att.start = "plus-family homotopy endpoint";
        att.system = "neumann";
        att.iterations = br.branch.size();
        used += br.branch.size();
        if (br.complete && !br.branch.empty()) {
            const SolutionPair& end = br.branch.back();
            att.residual = end.residual_max();
            att.converged = end.residual_max() <= accept_tol;
            double mind = std::numeric_limits<double>::infinity();
            for (const auto& s : out.solutions) mind = std::min(mind, pair_distance(s, end));
            att.min_distance_to_known = mind;
            if (att.converged && mind >= 0.05 &&
                std::max(end.u.max_abs(), end.v.max_abs()) <= out.regions.l1 &&
                end.u.min_value() >= -accept_tol && end.v.min_value() >= -accept_tol) {
                att.accepted = true;
                SolutionPair p = end;
                p.box_label = RegionLabel::annulus;
                p.boundary_class = classify_boundary(p, bs, accept_tol);
                out.solutions.push_back(std::move(p));
                out.third_found = true;
            }
        }
        out.search_log.push_back(std::move(att));
    }

    std::size_t k = 0;
    while (!out.third_found && used < budget) {
        const bool neumann_turn = (k % 2 == 0);
        const SparseOperator& A = neumann_turn ? An : Ad;
        const auto& sys = neumann_turn ? sys_n : sys_d;
        const auto& known = neumann_turn ? known_n : known_d;
        std::vector<double> w = known[0];
        const double scale = 1.0 + 2.0 * static_cast<double>(k % 5) / 4.0;
        for (double& x : w) x = scale * x + bump(rng) * out.regions.l2 * 0.1;
        run_start(A, sys, known, std::move(w),
                  "randomized start " + std::to_string(k));
        ++k;
    }
    out.search_complete = out.third_found || used >= budget;

    out.distances = pairwise_distance_matrix(out.solutions);
    return out;
}

} // namespace gm
