#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <json.hpp>

#include "gm/barriers.hpp"
#include "gm/errors.hpp"
#include "gm/grid.hpp"

namespace gm {

/// Closed form of the 1D Dirichlet barrier on (a, b):
/// -y'' + y = 1, y(a) = y(b) = 0  =>  y = 1 - cosh(x - m) / cosh(L/2).
inline double closed_form_y_1d(double x, double a, double b) {
    const double m = 0.5 * (a + b);
    return 1.0 - std::cosh(x - m) / std::cosh(0.5 * (b - a));
}

struct StudyReport {
    std::vector<std::size_t> n_list;
    std::vector<double> h_list;
    std::vector<double> errors;   // max-norm error of the discrete y
    double slope = 0.0;           // least-squares fit of log(err) vs log(h)
    bool errors_decrease = false;

    nlohmann::json to_json() const {
        return {{"n_list", n_list},
                {"h_list", h_list},
                {"errors", errors},
                {"slope", slope},
                {"errors_decrease", errors_decrease}};
    }
};

/// Discretization-order study: solves the Dirichlet barrier problem at each
/// resolution and fits the error decay rate against the 1D closed form.
inline StudyReport convergence_study(double lo, double hi,
                                     const std::vector<std::size_t>& n_list,
                                     double tol = 1e-12) {
    if (n_list.size() < 3)
        throw ConfigError("convergence_study: need at least 3 resolutions");
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
        if (n_list[i] >= n_list[i + 1])
            throw ConfigError("convergence_study: n_list must be strictly increasing");

    StudyReport rep;
    rep.n_list = n_list;
    for (std::size_t n : n_list) {
        const GridPtr grid = build_grid(1, {{lo, hi}}, {n});
        const Field y = compute_y(grid, tol);
        double err = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            err = std::max(err, std::abs(y[i] - closed_form_y_1d(grid->coord(i, 0), lo, hi)));
        rep.h_list.push_back(grid->h[0]);
        rep.errors.push_back(err);
    }

    rep.errors_decrease = true;
    for (std::size_t i = 0; i + 1 < rep.errors.size(); ++i)
        if (!(rep.errors[i] > rep.errors[i + 1])) rep.errors_decrease = false;

    // slope of log(err) against log(h), ordinary least squares
    const std::size_t m = rep.errors.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(rep.h_list[i]);
        const double y = std::log(rep.errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dm = static_cast<double>(m);
    rep.slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    return rep;
}

} // namespace gm
