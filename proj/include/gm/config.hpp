#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gm/barriers.hpp"
#include "gm/errors.hpp"
#include "gm/grid.hpp"

namespace gm {

/// Resolved run parameters. Field names double as the snake_case keys of the
/// JSON config file; the precedence is CLI flags > config file > defaults.
struct RunConfig {
    int dimension = 1;
    std::vector<std::pair<double, double>> extents{{0.0, 1.0}};
    std::vector<std::size_t> n{129};

    double alpha1 = 0.4, beta1 = 0.2, alpha2 = 0.4, beta2 = 0.2;

    double tol = 1e-12;          // linear / fixed-point tolerance
    double accept_tol = 1e-8;    // residual acceptance threshold
    double eig_tol = 1e-10;

    std::size_t max_iter = 500;
    std::size_t n_starts = 100;
    std::size_t t_steps = 21;
    std::size_t budget = 200;

    double lambda = 0.5;
    std::uint64_t seed = 7;
    std::string out_dir = ".";

    void validate() const {
        if (!(tol > 0.0) || !(accept_tol > 0.0) || !(eig_tol > 0.0))
            throw ConfigError("all tolerances must be positive");
        if (!ExponentConfig::valid(alpha1, beta1) || !ExponentConfig::valid(alpha2, beta2))
            throw ConfigError(
                "exponents must satisfy 0 < beta_i <= alpha_i and alpha_i + beta_i < 1");
        if (!(lambda > 0.0 && lambda < 1.0))
            throw ConfigError("lambda must lie in (0, 1)");
    }

    ExponentConfig exponents() const {
        return ExponentConfig(alpha1, beta1, alpha2, beta2);
    }

    GridPtr make_grid() const { return build_grid(dimension, extents, n); }

    nlohmann::json to_json() const {
        nlohmann::json ext = nlohmann::json::array();
        for (const auto& e : extents) ext.push_back({e.first, e.second});
        return {{"dimension", dimension},
                {"extents", ext},
                {"n", n},
                {"alpha1", alpha1},
                {"beta1", beta1},
                {"alpha2", alpha2},
                {"beta2", beta2},
                {"tol", tol},
                {"accept_tol", accept_tol},
                {"eig_tol", eig_tol},
                {"max_iter", max_iter},
                {"n_starts", n_starts},
                {"t_steps", t_steps},
                {"budget", budget},
                {"lambda", lambda},
                {"seed", seed},
                {"out_dir", out_dir}};
    }

    /// Overlays the keys present in j on top of the current values.
    void merge_json(const nlohmann::json& j) {
        if (j.contains("dimension")) dimension = j["dimension"].get<int>();
        if (j.contains("extents")) {
            extents.clear();
            for (const auto& e : j["extents"])
                extents.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
        }
        if (j.contains("n")) n = j["n"].get<std::vector<std::size_t>>();
        if (j.contains("alpha1")) alpha1 = j["alpha1"].get<double>();
        if (j.contains("beta1")) beta1 = j["beta1"].get<double>();
        if (j.contains("alpha2")) alpha2 = j["alpha2"].get<double>();
        if (j.contains("beta2")) beta2 = j["beta2"].get<double>();
        if (j.contains("tol")) tol = j["tol"].get<double>();
        if (j.contains("accept_tol")) accept_tol = j["accept_tol"].get<double>();
        if (j.contains("eig_tol")) eig_tol = j["eig_tol"].get<double>();
        if (j.contains("max_iter")) max_iter = j["max_iter"].get<std::size_t>();
        if (j.contains("n_starts")) n_starts = j["n_starts"].get<std::size_t>();
        if (j.contains("t_steps")) t_steps = j["t_steps"].get<std::size_t>();
        if (j.contains("budget")) budget = j["budget"].get<std::size_t>();
        if (j.contains("lambda")) lambda = j["lambda"].get<double>();
        if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out_dir")) out_dir = j["out_dir"].get<std::string>();
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("malformed config file " + path + ": " + e.what());
        }
        RunConfig cfg;
        cfg.merge_json(j);
        return cfg;
    }
};

/// Writes a JSON report with the resolved config attached under "config".
inline void write_report(const nlohmann::json& body, const RunConfig& cfg,
                         const std::string& path) {
    nlohmann::json j = body;
    j["config"] = cfg.to_json();
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

} // namespace gm
