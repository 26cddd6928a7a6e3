// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each check is run at its stated tolerance and budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <vector>

#include "gm/gm.hpp"
#include "oracles.hpp"

using namespace gm;

namespace {

int failures = 0;

void criterion(int n, const char* what, bool pass) {
    std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", n, what);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::array<std::array<double, 4>, 3> kExponentSets{
    {{0.4, 0.2, 0.4, 0.2}, {0.3, 0.3, 0.3, 0.3}, {0.5, 0.1, 0.45, 0.15}}};

} // namespace

int main() {
    std::printf("acceptance run\n");

    // 1. eigenpair exactness ------------------------------------------------
    {
        bool ok = true;
        for (auto spec : std::vector<std::pair<int, std::vector<std::size_t>>>{
                 {1, {33}}, {1, {129}}, {2, {33, 33}}}) {
            const auto t0 = std::chrono::steady_clock::now();
            std::vector<std::pair<double, double>> ext(spec.first, {0.0, 1.0});
            auto g = build_grid(spec.first, ext, spec.second);
            auto e = smallest_eigenpair(neumann_operator(g));
            const double elapsed = seconds_since(t0);
            ok = ok && std::abs(e.lambda1 - 1.0) <= 1e-10;
            ok = ok && (e.phi1.max_value() - e.phi1.min_value()) <=
                           1e-8 * e.phi1.max_abs();
            ok = ok && elapsed < 1.0;
        }
        criterion(1, "smallest eigenpair is (1, constant) on 1D and 2D grids", ok);
    }

    // 2. barrier exactness --------------------------------------------------
    {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        for (auto spec : std::vector<std::pair<int, std::vector<std::size_t>>>{
                 {1, {33}}, {1, {129}}, {1, {257}}, {2, {17, 17}}, {2, {33, 33}}}) {
            std::vector<std::pair<double, double>> ext(spec.first, {0.0, 1.0});
            auto g = build_grid(spec.first, ext, spec.second);
            Field z = compute_z(g);
            for (std::size_t i = 0; i < z.size(); ++i)
                ok = ok && std::abs(z[i] - 1.0) <= 1e-12;
        }
        auto g = build_grid(1, {{0.0, 1.0}}, {257});
        Field y = compute_y(g);
        double err = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            err = std::max(err,
                           std::abs(y[i] - closed_form_y_1d(g->coord(i, 0), 0.0, 1.0)));
        ok = ok && err <= 1e-4;
        auto study = convergence_study(0.0, 1.0, {33, 65, 129, 257});
        ok = ok && std::abs(study.slope - 2.0) <= 0.2;
        ok = ok && seconds_since(t0) < 5.0;
        criterion(2, "z is one, y matches the closed form, order of accuracy is 2", ok);
    }

    // 3. calibration soundness ----------------------------------------------
    {
        bool ok = true;
        auto g = build_grid(1, {{0.0, 1.0}}, {129});
        for (const auto& s : kExponentSets) {
            const auto t0 = std::chrono::steady_clock::now();
            ExponentConfig ex(s[0], s[1], s[2], s[3]);
            BarrierSet bs = build_barriers(g, ex);
            for (std::size_t i = 0; i < bs.y.size(); ++i)
                ok = ok && bs.y_delta[i] >= 0.5 * bs.y[i] - 1e-12;
            auto [bi, bb] = make_boxes(bs);
            ok = ok && verify_subsuper(bi, ex).all_pass();
            ok = ok && verify_subsuper(bb, ex).all_pass();
            ok = ok && seconds_since(t0) < 10.0;
        }
        criterion(3, "delta and C calibrations terminate and both certificates pass", ok);
    }

    // 4. constant-solution recovery ------------------------------------------
    {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        auto g = build_grid(1, {{0.0, 1.0}}, {129});
        for (const auto& s : kExponentSets) {
            ExponentConfig ex(s[0], s[1], s[2], s[3]);
            BarrierSet bs = build_barriers(g, ex);
            auto [bi, bb] = make_boxes(bs);
            auto rep = picard_solve_in_box(bi, ex);
            ok = ok && rep.converged && rep.residual_u <= 1e-8 && rep.residual_v <= 1e-8;
            for (std::size_t i = 0; i < rep.pair.u.size(); ++i)
                ok = ok && std::abs(rep.pair.u[i] - 1.0) <= 1e-6 &&
                     std::abs(rep.pair.v[i] - 1.0) <= 1e-6;
        }
        ok = ok && seconds_since(t0) < 10.0;
        criterion(4, "interior-box iteration recovers the constant solution (1,1)", ok);
    }

    // 5 and 6 share the two box solutions at n = 129 --------------------------
    SolutionPair sol1, sol2;
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto g = build_grid(1, {{0.0, 1.0}}, {129});
        ExponentConfig ex(0.4, 0.2, 0.4, 0.2);
        BarrierSet bs = build_barriers(g, ex);
        auto [bi, bb] = make_boxes(bs);
        auto ri = picard_solve_in_box(bi, ex);
        auto rb = picard_solve_in_box(bb, ex);
        sol1 = ri.pair;
        sol2 = rb.pair;

        bool ok = rb.converged;
        ok = ok && rb.residual_u <= 1e-8 && rb.residual_v <= 1e-8;
        ok = ok && boundary_trace_max(rb.pair.u) <= 1e-6 &&
             boundary_trace_max(rb.pair.v) <= 1e-6;
        double interior_min = 1e300;
        for (std::size_t i = 0; i < rb.pair.u.size(); ++i)
            if (!g->boundary_mask[i])
                interior_min = std::min({interior_min, rb.pair.u[i], rb.pair.v[i]});
        ok = ok && interior_min > 0.0;
        for (std::size_t i = 0; i < rb.pair.u.size(); ++i)
            ok = ok && rb.pair.u[i] >= bb.lower_u[i] - 1e-10 &&
                 rb.pair.u[i] <= bb.upper_u[i] + 1e-10 &&
                 rb.pair.v[i] >= bb.lower_v[i] - 1e-10 &&
                 rb.pair.v[i] <= bb.upper_v[i] + 1e-10;
        ok = ok && seconds_since(t0) < 30.0;
        criterion(5, "boundary box yields a positive, boundary-vanishing solution", ok);

        const double du = max_norm_distance(sol1.u, sol2.u);
        const double dv = max_norm_distance(sol1.v, sol2.v);
        criterion(6, "the two trapped solutions are distinct in both components",
                  du >= 0.05 && dv >= 0.05);
    }

    // 7. Jacobian correctness -------------------------------------------------
    {
        auto g = build_grid(1, {{0.0, 1.0}}, {17});
        auto A = neumann_operator(g);
        ExponentConfig ex(0.4, 0.2, 0.4, 0.2);
        NewtonSystem sys = make_gm_system(A, ex);
        std::mt19937_64 rng(41);
        bool ok = true;
        for (int rep = 0; rep < 20; ++rep) {
            auto w = oracle::random_vector(rng, 2 * A.rows, 0.5, 2.0);
            auto dir = oracle::random_vector(rng, 2 * A.rows, -1.0, 1.0);
            DenseMatrix J = sys.jacobian(w);
            std::vector<double> jv(w.size(), 0.0);
            for (std::size_t i = 0; i < w.size(); ++i)
                for (std::size_t j = 0; j < w.size(); ++j) jv[i] += J(i, j) * dir[j];
            const double eps = 1e-6;
            std::vector<double> wp = w, wm = w;
            for (std::size_t i = 0; i < w.size(); ++i) {
                wp[i] += eps * dir[i];
                wm[i] -= eps * dir[i];
            }
            auto fp = sys.residual(wp);
            auto fm = sys.residual(wm);
            double scale = 0.0, errn = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double fd = (fp[i] - fm[i]) / (2.0 * eps);
                scale = std::max(scale, std::abs(jv[i]));
                errn = std::max(errn, std::abs(jv[i] - fd));
            }
            ok = ok && errn <= 1e-6 * scale;
        }
        criterion(7, "analytic Jacobian-vector products match central differences", ok);
    }

    // 8. deflation machinery ----------------------------------------------------
    {
        NewtonSystem sys;
        sys.size = 1;
        sys.residual = [](const std::vector<double>& w) {
            return std::vector<double>{w[0] * w[0] * w[0] - w[0]};
        };
        sys.jacobian = [](const std::vector<double>& w) {
            DenseMatrix J(1);
            J(0, 0) = 3.0 * w[0] * w[0] - 1.0;
            return J;
        };
        std::vector<std::vector<double>> known;
        std::mt19937_64 rng(43);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        // successive deflation sweeps until no new root turns up
        for (int round = 0; round < 5 && known.size() < 3; ++round)
            for (int s = 0; s < 20 && known.size() < 3; ++s) {
                auto r = deflated_newton_solve(sys, known, {dist(rng)}, 1e-10, 100);
                if (!r.converged) continue;
                bool fresh = true;
                for (const auto& k : known)
                    if (std::abs(r.w[0] - k[0]) < 0.05) fresh = false;
                if (fresh) known.push_back(r.w);
            }
        std::set<long> roots;
        for (const auto& k : known) roots.insert(std::lround(k[0] * 1000.0));
        bool ok = roots == std::set<long>{-1000, 0, 1000};

        int extras = 0;
        for (int s = 0; s < 50; ++s) {
            auto r = deflated_newton_solve(sys, known, {dist(rng)}, 1e-10, 100);
            double mind = 1e300;
            for (const auto& k : known) mind = std::min(mind, std::abs(r.w[0] - k[0]));
            if (r.converged && mind > 0.05) ++extras;
        }
        ok = ok && extras == 0;
        criterion(8, "cubic self-test recovers all roots, then reports exhaustion", ok);
    }

    // 9. nonexistence probes -----------------------------------------------------
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto g = build_grid(1, {{0.0, 1.0}}, {65});
        auto rep = check_l9_nonexistence(g, 0.5, 100, 1e-9, 9);
        auto abs_rep = abs_family_t0_probe(g, 0.5, 50, 1e-9, 10);
        const bool identities = std::abs(rep.residual_at_zero - 0.5) <= 1e-12 &&
                                std::abs(rep.residual_at_phi1 - 1.0) <= 1e-9;
        const bool ok = identities && rep.converged_roots == 0 &&
                        abs_rep.converged_roots == 0 &&
                        seconds_since(t0) < 60.0;
        criterion(9, "scalar and coupled deformation problems admit no discrete root",
                  ok);
        if (!ok) {
            std::printf(
                "  finding: the discrete (and continuum) problem has the exact\n"
                "  constant root u = lambda*phi1/(1+lambda): for 0 < u < phi1 the\n"
                "  right side is lambda*(phi1 - u), and constants satisfy A u = u,\n"
                "  so u = lambda*phi1/(1+lambda) solves it identically. The source\n"
                "  analysis drops the zero-order term in its final test-function\n"
                "  estimate, so its nonexistence claim does not hold; the coupled\n"
                "  deformation problem at t = 0 admits the same constant pair.\n"
                "  probe results: scalar %zu/100 starts converged (min residual\n"
                "  %.2e), coupled %zu/50 starts converged; residual identities at\n"
                "  0 and phi1 %s.\n",
                rep.converged_roots, rep.min_residual, abs_rep.converged_roots,
                identities ? "hold" : "FAIL");
        }
    }

    // 10. third-solution search ----------------------------------------------------
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto g = build_grid(1, {{0.0, 1.0}}, {129});
        ExponentConfig ex(0.4, 0.2, 0.4, 0.2);
        auto res = find_three_solutions(g, ex, 7, 200);
        bool ok = res.n_found() >= 2;
        if (res.third_found) {
            const auto& s3 = res.solutions[2];
            ok = ok && s3.residual_max() <= 1e-8;
            ok = ok && res.distances[0][2] >= 0.05 && res.distances[1][2] >= 0.05;
            // outside both boxes: rebuild them and look for a violated node
            BarrierSet bs = build_barriers(g, ex);
            auto [bi, bb] = make_boxes(bs);
            auto outside = [&](const BoxSpec& box) {
                for (std::size_t i = 0; i < s3.u.size(); ++i)
                    if (s3.u[i] < box.lower_u[i] - 1e-10 ||
                        s3.u[i] > box.upper_u[i] + 1e-10 ||
                        s3.v[i] < box.lower_v[i] - 1e-10 ||
                        s3.v[i] > box.upper_v[i] + 1e-10)
                        return true;
                return false;
            };
            ok = ok && outside(bi) && outside(bb);
        } else {
            ok = ok && res.search_complete && !res.search_log.empty();
        }
        ok = ok && seconds_since(t0) < 300.0;
        criterion(10,
                  res.third_found
                      ? "search found a distinct third solution outside both boxes"
                      : "search exhausted its budget with a complete log (2 solutions)",
                  ok);
    }

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
