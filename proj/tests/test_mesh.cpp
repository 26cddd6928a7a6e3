#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gm/grid.hpp"

using namespace gm;

TEST_CASE("1D grid basics") {
    auto g = build_grid(1, {{0.0, 1.0}}, {5});
    REQUIRE(g->node_count() == 5);
    REQUIRE(g->h[0] == Catch::Approx(0.25));
    REQUIRE(g->coord(0, 0) == 0.0);
    REQUIRE(g->coord(4, 0) == Catch::Approx(1.0));
    REQUIRE(g->boundary_mask[0]);
    REQUIRE(g->boundary_mask[4]);
    REQUIRE_FALSE(g->boundary_mask[2]);
    REQUIRE(g->dist[2] == Catch::Approx(0.5));
    REQUIRE(g->dist[1] == Catch::Approx(0.25));
    REQUIRE(g->dist[0] == 0.0);
    // trapezoidal weights sum to the interval length
    double sum = 0.0;
    for (double w : g->weights) sum += w;
    REQUIRE(sum == Catch::Approx(1.0));
}

TEST_CASE("2D grid indexing is lexicographic in (x, y)") {
    auto g = build_grid(2, {{0.0, 1.0}, {0.0, 2.0}}, {4, 3});
    REQUIRE(g->node_count() == 12);
    REQUIRE(g->index(0, 0) == 0);
    REQUIRE(g->index(0, 2) == 2);
    REQUIRE(g->index(1, 0) == 3);
    REQUIRE(g->coord(g->index(2, 1), 0) == Catch::Approx(2.0 / 3.0));
    REQUIRE(g->coord(g->index(2, 1), 1) == Catch::Approx(1.0));
    // quadrature weights integrate 1 to the domain area
    double sum = 0.0;
    for (double w : g->weights) sum += w;
    REQUIRE(sum == Catch::Approx(2.0));
    // distance at an interior node is the min over the four walls
    REQUIRE(g->dist[g->index(1, 1)] == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("degenerate configurations are rejected") {
    REQUIRE_THROWS_AS(build_grid(1, {{0.0, 1.0}}, {2}), ConfigError);
    REQUIRE_THROWS_AS(build_grid(1, {{1.0, 1.0}}, {5}), ConfigError);
    REQUIRE_THROWS_AS(build_grid(1, {{2.0, 1.0}}, {5}), ConfigError);
    REQUIRE_THROWS_AS(build_grid(3, {{0.0, 1.0}}, {5}), ConfigError);
    REQUIRE_THROWS_AS(build_grid(2, {{0.0, 1.0}}, {5}), ConfigError);
}

TEST_CASE("boundary traces and distances") {
    auto g = build_grid(1, {{0.0, 1.0}}, {9});
    Field f(g, 2.0);
    f[0] = -3.0;
    f[8] = 1.0;
    REQUIRE(boundary_trace_max(f) == 3.0);
    REQUIRE(boundary_trace_min(f) == -3.0);

    Field a(g, 1.0), b(g, 1.0);
    b[4] = 1.5;
    REQUIRE(max_norm_distance(a, b) == Catch::Approx(0.5));
}

TEST_CASE("discrete C1 norm") {
    auto g = build_grid(1, {{0.0, 1.0}}, {5});
    Field f(g, 0.0);
    for (std::size_t i = 0; i < 5; ++i) f[i] = 0.25 * static_cast<double>(i);
    // max |f| = 1, max slope = 1
    REQUIRE(c1_norm(f) == Catch::Approx(2.0));
    Field c(g, 3.0);
    REQUIRE(c1_norm(c) == Catch::Approx(3.0));
}

TEST_CASE("CSV export uses x[,y],value rows in node order") {
    auto g = build_grid(2, {{0.0, 1.0}, {0.0, 1.0}}, {3, 3});
    Field f(g, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i);
    const std::string path = "test_mesh_field.csv";
    write_field_csv(f, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "x,y,value");
    std::getline(in, line);
    REQUIRE(line == "0,0,0");
    std::getline(in, line);
    REQUIRE(line == "0,0.5,1");   // second node is (ix=0, iy=1)
    std::remove(path.c_str());
}
