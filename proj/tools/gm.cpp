// Command-line front end for the steady-state toolkit: pipeline commands,
// JSON reports, CSV field exports.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gm/gm.hpp"

namespace {

namespace fs = std::filesystem;

std::string out_path(const gm::RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

// Parses repeatable "lo,hi" extent strings.
std::vector<std::pair<double, double>> parse_extents(const std::vector<std::string>& raw) {
    std::vector<std::pair<double, double>> out;
    for (const auto& s : raw) {
        const auto comma = s.find(',');
        if (comma == std::string::npos)
            throw gm::ConfigError("--extent expects lo,hi, got: " + s);
        out.emplace_back(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
    }
    return out;
}

void export_pair(const gm::RunConfig& cfg, const gm::SolutionPair& p,
                 const std::string& stem, nlohmann::json& body) {
    const std::string up = out_path(cfg, stem + "_u.csv");
    const std::string vp = out_path(cfg, stem + "_v.csv");
    gm::write_field_csv(p.u, up);
    gm::write_field_csv(p.v, vp);
    body[stem + "_u_csv"] = up;
    body[stem + "_v_csv"] = vp;
}

int cmd_eig(const gm::RunConfig& cfg) {
    const gm::GridPtr grid = cfg.make_grid();
    const gm::SparseOperator A = gm::neumann_operator(grid);
    const gm::Eigenpair eig = gm::smallest_eigenpair(A, cfg.eig_tol);
    const std::string csv = out_path(cfg, "phi1.csv");
    gm::write_field_csv(eig.phi1, csv);
    gm::write_report({{"lambda1", eig.lambda1},
                      {"phi1_csv_path", csv},
                      {"residual", eig.residual}},
                     cfg, out_path(cfg, "eig.json"));
    std::printf("lambda1=%.6f\n", eig.lambda1);
    return 0;
}

int cmd_barriers(const gm::RunConfig& cfg) {
    const gm::GridPtr grid = cfg.make_grid();
    const gm::BarrierSet bs = gm::build_barriers(grid, cfg.exponents(), cfg.tol, cfg.eig_tol);
    nlohmann::json body{{"lambda1", bs.eig.lambda1}, {"delta", bs.delta},
                        {"mu_bar", bs.mu_bar},     {"mu_under", bs.mu_under},
                        {"c0", bs.c0},             {"c1", bs.c1},
                        {"c", bs.c},               {"C_interior", bs.C_interior},
                        {"C_boundary", bs.C_boundary}};
    for (const auto& [name, f] :
         {std::pair<const char*, const gm::Field*>{"phi1", &bs.eig.phi1},
          {"z", &bs.z},
          {"y", &bs.y},
          {"y_delta", &bs.y_delta}}) {
        const std::string csv = out_path(cfg, std::string(name) + ".csv");
        gm::write_field_csv(*f, csv);
        body[std::string(name) + "_csv"] = csv;
    }
    gm::write_report(body, cfg, out_path(cfg, "barriers.json"));
    std::printf("barriers: delta=%g C_interior=%g C_boundary=%g\n", bs.delta,
                bs.C_interior, bs.C_boundary);
    return 0;
}

int cmd_certify(const gm::RunConfig& cfg) {
    const gm::GridPtr grid = cfg.make_grid();
    const gm::ExponentConfig ex = cfg.exponents();
    const gm::BarrierSet bs = gm::build_barriers(grid, ex, cfg.tol, cfg.eig_tol);
    const auto [interior, boundary] = gm::make_boxes(bs);
    const gm::CertificateReport ci = gm::verify_subsuper(interior, ex);
    const gm::CertificateReport cb = gm::verify_subsuper(boundary, ex);
    gm::write_report({{"interior", ci.to_json()}, {"boundary", cb.to_json()}}, cfg,
                     out_path(cfg, "certify.json"));
    const bool ok = ci.all_pass() && cb.all_pass();
    std::printf("certify: interior=%s boundary=%s\n", ci.all_pass() ? "pass" : "FAIL",
                cb.all_pass() ? "pass" : "FAIL");
    if (!ok) {
        for (const auto& rep : {ci, cb})
            for (const auto& chk : rep.checks)
                if (!chk.pass)
                    std::fprintf(stderr, "violated: %s box, %s, worst slack %g at node %zu\n",
                                 gm::to_string(rep.label), chk.inequality_id.c_str(),
                                 chk.worst_slack, chk.worst_node);
        return 1;
    }
    return 0;
}

int cmd_solve_box(const gm::RunConfig& cfg, gm::BoxLabel which) {
    const gm::GridPtr grid = cfg.make_grid();
    const gm::ExponentConfig ex = cfg.exponents();
    const gm::BarrierSet bs = gm::build_barriers(grid, ex, cfg.tol, cfg.eig_tol);
    const auto [interior, boundary] = gm::make_boxes(bs);
    const gm::BoxSpec& box = which == gm::BoxLabel::interior ? interior : boundary;
    const gm::CertificateReport cert = gm::verify_subsuper(box, ex);
    if (!cert.all_pass()) {
        std::fprintf(stderr, "certificate failed for the %s box\n", gm::to_string(which));
        return 1;
    }
    gm::SolveReport rep = gm::picard_solve_in_box(box, ex, std::nullopt, cfg.accept_tol,
                                                  cfg.max_iter, cfg.tol);
    rep.boundary_class = gm::classify_boundary(rep.pair, bs, cfg.accept_tol);
    nlohmann::json body = rep.to_json();
    body["boundary_class"] = gm::to_string(rep.boundary_class);
    const std::string stem = std::string("solve_") + gm::to_string(which);
    export_pair(cfg, rep.pair, stem, body);
    gm::write_report(body, cfg, out_path(cfg, stem + ".json"));
    std::printf("%s: converged=%d residual=(%g, %g) class=%s\n", stem.c_str(),
                rep.converged ? 1 : 0, rep.residual_u, rep.residual_v,
                gm::to_string(rep.boundary_class));
    return rep.converged ? 0 : 3;
}

int cmd_solve_all(const gm::RunConfig& cfg) {
    const gm::GridPtr grid = cfg.make_grid();
    gm::MultiRootResult res = gm::find_three_solutions(grid, cfg.exponents(), cfg.seed,
                                                       cfg.budget, cfg.accept_tol);
    nlohmann::json body = res.to_json();
    for (std::size_t i = 0; i < res.solutions.size(); ++i)
        export_pair(cfg, res.solutions[i], "sol" + std::to_string(i + 1), body);
    gm::write_report(body, cfg, out_path(cfg, "solve_all.json"));
    std::printf("solve-all: %zu solutions found (third=%s)\n", res.n_found(),
                res.third_found ? "yes" : "no");
    return res.third_found ? 0 : 2;
}

int cmd_l9_probe(const gm::RunConfig& cfg) {
    const gm::GridPtr grid = cfg.make_grid();
    const gm::NonexistenceReport rep = gm::check_l9_nonexistence(
        grid, cfg.lambda, cfg.n_starts, cfg.accept_tol, cfg.seed);
    gm::write_report(rep.to_json(), cfg, out_path(cfg, "l9.json"));
    std::printf("l9-probe: converged_roots=%zu min_residual=%g residual(0)=%g "
                "residual(phi1)=%g\n",
                rep.converged_roots, rep.min_residual, rep.residual_at_zero,
                rep.residual_at_phi1);
    return 0;
}

int cmd_homotopy(const gm::RunConfig& cfg, const std::string& family) {
    const gm::GridPtr grid = cfg.make_grid();
    gm::HomotopyConfig hc;
    hc.family = family == "abs" ? gm::HomotopyFamily::abs_family
                                : gm::HomotopyFamily::plus_family;
    hc.lambda = cfg.lambda;
    hc.t_schedule = gm::HomotopyConfig::uniform_schedule(cfg.t_steps);
    const gm::HomotopyBranch br = gm::homotopy_solve(hc, cfg.exponents(), grid, std::nullopt,
                                                     cfg.accept_tol);
    nlohmann::json body{{"family", family},
                        {"complete", br.complete},
                        {"failure_index", br.failure_index},
                        {"t_values", br.t_values}};
    nlohmann::json residuals = nlohmann::json::array();
    for (const auto& p : br.branch) residuals.push_back(p.residual_max());
    body["residuals"] = residuals;
    if (br.complete && !br.branch.empty())
        export_pair(cfg, br.branch.back(), "homotopy_end", body);
    gm::write_report(body, cfg, out_path(cfg, "homotopy.json"));
    std::printf("homotopy(%s): complete=%d steps=%zu\n", family.c_str(),
                br.complete ? 1 : 0, br.branch.size());
    if (!br.complete && hc.family == gm::HomotopyFamily::plus_family) return 3;
    return 0;
}

int cmd_study(const gm::RunConfig& cfg, const std::vector<std::size_t>& n_list) {
    if (cfg.dimension != 1)
        throw gm::ConfigError("convergence-study: only 1D has a closed-form reference");
    const gm::StudyReport rep = gm::convergence_study(cfg.extents[0].first,
                                                      cfg.extents[0].second, n_list, cfg.tol);
    gm::write_report(rep.to_json(), cfg, out_path(cfg, "study.json"));
    std::printf("convergence-study: slope=%.3f errors_decrease=%d\n", rep.slope,
                rep.errors_decrease ? 1 : 0);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady-state solver for the coupled activator-inhibitor system"};
    app.require_subcommand(1);

    gm::RunConfig flags;   // values coming from explicit flags only
    std::string config_path, family = "plus";
    std::vector<std::string> extent_raw;
    std::vector<std::size_t> n_flag, n_list{33, 65, 129, 257};

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--dim", flags.dimension, "domain dimension (1 or 2)");
        sub->add_option("--extent", extent_raw, "axis extent as lo,hi (repeat per axis)");
        sub->add_option("--n", n_flag, "nodes per axis (repeat per axis)");
        sub->add_option("--a1", flags.alpha1, "exponent alpha1");
        sub->add_option("--b1", flags.beta1, "exponent beta1");
        sub->add_option("--a2", flags.alpha2, "exponent alpha2");
        sub->add_option("--b2", flags.beta2, "exponent beta2");
        sub->add_option("--tol", flags.tol, "linear/fixed-point tolerance");
        sub->add_option("--accept-tol", flags.accept_tol, "residual acceptance threshold");
        sub->add_option("--eig-tol", flags.eig_tol, "eigenpair tolerance");
        sub->add_option("--max-iter", flags.max_iter, "fixed-point iteration budget");
        sub->add_option("--n-starts", flags.n_starts, "multistart count");
        sub->add_option("--t-steps", flags.t_steps, "homotopy schedule length");
        sub->add_option("--budget", flags.budget, "annulus search budget");
        sub->add_option("--lambda", flags.lambda, "deformation coefficient in (0,1)");
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--out", flags.out_dir, "output directory");
        sub->add_option("--config", config_path, "JSON config file (flags override it)");
    };

    CLI::App* sub_eig = app.add_subcommand("eig", "smallest eigenpair of the operator");
    CLI::App* sub_barriers = app.add_subcommand("barriers", "barrier fields and constants");
    CLI::App* sub_certify = app.add_subcommand("certify", "check both box certificates");
    CLI::App* sub_si = app.add_subcommand("solve-interior", "solve in the interior box");
    CLI::App* sub_sb = app.add_subcommand("solve-boundary", "solve in the boundary box");
    CLI::App* sub_all = app.add_subcommand("solve-all", "full three-solution pipeline");
    CLI::App* sub_l9 = app.add_subcommand("l9-probe", "scalar nonexistence probe");
    CLI::App* sub_hom = app.add_subcommand("homotopy", "continuation over the t schedule");
    CLI::App* sub_study =
        app.add_subcommand("convergence-study", "discretization-order study");
    for (CLI::App* s : {sub_eig, sub_barriers, sub_certify, sub_si, sub_sb, sub_all,
                        sub_l9, sub_hom, sub_study})
        add_common(s);
    sub_hom->add_option("--family", family, "homotopy family: plus or abs")
        ->check(CLI::IsMember({"plus", "abs"}));
    sub_study->add_option("--n-list", n_list, "resolutions for the study");

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();

    try {
        // precedence: defaults < config file < explicit flags
        gm::RunConfig cfg;
        if (sub->count("--config")) cfg = gm::RunConfig::from_file(config_path);
        if (sub->count("--dim")) cfg.dimension = flags.dimension;
        if (sub->count("--extent")) cfg.extents = parse_extents(extent_raw);
        if (sub->count("--n")) cfg.n = n_flag;
        if (sub->count("--a1")) cfg.alpha1 = flags.alpha1;
        if (sub->count("--b1")) cfg.beta1 = flags.beta1;
        if (sub->count("--a2")) cfg.alpha2 = flags.alpha2;
        if (sub->count("--b2")) cfg.beta2 = flags.beta2;
        if (sub->count("--tol")) cfg.tol = flags.tol;
        if (sub->count("--accept-tol")) cfg.accept_tol = flags.accept_tol;
        if (sub->count("--eig-tol")) cfg.eig_tol = flags.eig_tol;
        if (sub->count("--max-iter")) cfg.max_iter = flags.max_iter;
        if (sub->count("--n-starts")) cfg.n_starts = flags.n_starts;
        if (sub->count("--t-steps")) cfg.t_steps = flags.t_steps;
        if (sub->count("--budget")) cfg.budget = flags.budget;
        if (sub->count("--lambda")) cfg.lambda = flags.lambda;
        if (sub->count("--seed")) cfg.seed = flags.seed;
        if (sub->count("--out")) cfg.out_dir = flags.out_dir;
        cfg.validate();

        if (sub == sub_eig) return cmd_eig(cfg);
        if (sub == sub_barriers) return cmd_barriers(cfg);
        if (sub == sub_certify) return cmd_certify(cfg);
        if (sub == sub_si) return cmd_solve_box(cfg, gm::BoxLabel::interior);
        if (sub == sub_sb) return cmd_solve_box(cfg, gm::BoxLabel::boundary);
        if (sub == sub_all) return cmd_solve_all(cfg);
        if (sub == sub_l9) return cmd_l9_probe(cfg);
        if (sub == sub_hom) return cmd_homotopy(cfg, family);
        if (sub == sub_study) return cmd_study(cfg, n_list);
    } catch (const gm::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const gm::CalibrationError& e) {
        std::cerr << "calibration/certificate error: " << e.what() << '\n';
        return 1;
    } catch (const gm::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
