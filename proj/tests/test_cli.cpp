#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef GM_CLI_PATH
#error "GM_CLI_PATH must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(GM_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("gm_cli_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

nlohmann::json load(const std::string& dir, const std::string& name) {
    std::ifstream in(fs::path(dir) / name);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

} // namespace

TEST_CASE("eig prints the unit eigenvalue and writes its report") {
    const std::string out = temp_dir("eig");
    auto r = run("eig --dim 1 --extent 0,1 --n 129 --out " + out);
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("lambda1=1.000000") != std::string::npos);
    auto j = load(out, "eig.json");
    REQUIRE(j["lambda1"].get<double>() == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(j.contains("config"));
    REQUIRE(j["config"]["n"][0] == 129);
    REQUIRE(fs::exists(fs::path(out) / "phi1.csv"));
}

TEST_CASE("invalid exponents abort with a configuration error naming the constraint") {
    const std::string out = temp_dir("badexp");
    auto r = run("certify --dim 1 --extent 0,1 --n 33 --a1 0.9 --b1 0.2 --out " + out);
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.output.find("alpha_i + beta_i < 1") != std::string::npos);
}

TEST_CASE("unknown subcommands and flags are usage errors") {
    REQUIRE(run("frobnicate").exit_code != 0);
    REQUIRE(run("eig --frobnicate 3").exit_code != 0);
    REQUIRE(run("").exit_code != 0);
}

TEST_CASE("certify passes on a sound configuration") {
    const std::string out = temp_dir("certok");
    auto r = run("certify --dim 1 --extent 0,1 --n 65 --out " + out);
    REQUIRE(r.exit_code == 0);
    auto j = load(out, "certify.json");
    REQUIRE(j["interior"]["pass"].get<bool>());
    REQUIRE(j["boundary"]["pass"].get<bool>());
    REQUIRE(j["interior"]["inequalities"].size() == 4);
}

TEST_CASE("config file is honored and flags override it") {
    const std::string out = temp_dir("cfg");
    const std::string cfg_path = out + "/run.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"dimension": 1, "n": [33], "alpha1": 0.3, "beta1": 0.3,
                   "alpha2": 0.3, "beta2": 0.3, "out_dir": ")" << out << R"("})";
    }
    auto r = run("eig --config " + cfg_path);
    REQUIRE(r.exit_code == 0);
    auto j = load(out, "eig.json");
    REQUIRE(j["config"]["n"][0] == 33);
    REQUIRE(j["config"]["alpha1"].get<double>() == Catch::Approx(0.3));

    // a flag beats the file
    auto r2 = run("eig --config " + cfg_path + " --n 17");
    REQUIRE(r2.exit_code == 0);
    auto j2 = load(out, "eig.json");
    REQUIRE(j2["config"]["n"][0] == 17);
}

TEST_CASE("convergence study validates its resolution list") {
    const std::string out = temp_dir("study");
    auto ok = run("convergence-study --n-list 33 65 129 257 --out " + out);
    REQUIRE(ok.exit_code == 0);
    auto j = load(out, "study.json");
    REQUIRE(j["slope"].get<double>() == Catch::Approx(2.0).margin(0.2));
    REQUIRE(j["errors_decrease"].get<bool>());

    REQUIRE(run("convergence-study --n-list 9 --out " + out).exit_code == 1);
    REQUIRE(run("convergence-study --dim 2 --extent 0,1 --extent 0,1 --n 9 --n 9 --out " +
                out).exit_code == 1);
}

TEST_CASE("box solves export fields and report residuals") {
    const std::string out = temp_dir("solve");
    auto r = run("solve-interior --dim 1 --extent 0,1 --n 33 --out " + out);
    REQUIRE(r.exit_code == 0);
    auto j = load(out, "solve_interior.json");
    REQUIRE(j["converged"].get<bool>());
    REQUIRE(j["residual_u"].get<double>() <= 1e-8);
    REQUIRE(j["boundary_class"] == "positive");
    REQUIRE(fs::exists(fs::path(out) / "solve_interior_u.csv"));

    auto rb = run("solve-boundary --dim 1 --extent 0,1 --n 33 --out " + out);
    REQUIRE(rb.exit_code == 0);
    auto jb = load(out, "solve_boundary.json");
    REQUIRE(jb["boundary_class"] == "vanishing");
}

TEST_CASE("identical configurations give bitwise-identical reports") {
    const std::string out1 = temp_dir("det1");
    const std::string out2 = temp_dir("det2");
    const std::string args = "--dim 1 --extent 0,1 --n 33 --seed 7 --budget 20 ";
    REQUIRE(run("solve-all " + args + "--out " + out1).exit_code ==
            run("solve-all " + args + "--out " + out2).exit_code);
    auto j1 = load(out1, "solve_all.json");
    auto j2 = load(out2, "solve_all.json");
    auto strip = [&](nlohmann::json& j, const std::string& dir) {
        j["interior_report"].erase("wall_time_ms");
        j["boundary_report"].erase("wall_time_ms");
        j["config"].erase("out_dir");
        // exported CSV paths embed the output directory
        for (auto& [key, val] : j.items())
            if (key.size() > 4 && key.substr(key.size() - 4) == "_csv") val = "";
        (void)dir;
    };
    strip(j1, out1);
    strip(j2, out2);
    REQUIRE(j1.dump() == j2.dump());
}
