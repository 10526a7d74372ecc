#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "lobeq/grid.hpp"
#include "lobeq/interp.hpp"

using namespace lobeq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("grid is symmetric with an exact zero node and uniform core") {
    GridParams p;
    p.tail_max_sigmas = 50.0;
    Grid g = build_grid(p, 1.0);
    REQUIRE(g.nodes.size() % 2 == 1);
    CHECK(g.nodes[g.zero_index] == 0.0);
    CHECK_THAT(g.nodes.back(), WithinRel(50.0, 1e-12));
    CHECK_THAT(g.nodes.front(), WithinRel(-50.0, 1e-12));
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        CHECK(g.nodes[i] + g.nodes[g.nodes.size() - 1 - i] == 0.0);
        if (i) CHECK(g.nodes[i] > g.nodes[i - 1]);
    }
    // core spacing
    CHECK_THAT(g.nodes[g.zero_index + 1] - g.nodes[g.zero_index], WithinRel(0.02, 1e-12));
    CHECK_THAT(g.core_step, WithinRel(0.02, 1e-12));
}

TEST_CASE("grid scales linearly with the noise size") {
    GridParams p;
    p.tail_max_sigmas = 50.0;
    Grid g1 = build_grid(p, 1.0), g2 = build_grid(p, 2.0);
    REQUIRE(g1.nodes.size() == g2.nodes.size());
    for (std::size_t i = 0; i < g1.nodes.size(); ++i)
        CHECK_THAT(g2.nodes[i], WithinAbs(2.0 * g1.nodes[i], 1e-12));
}

TEST_CASE("grid rejects degenerate parameters") {
    GridParams p;
    CHECK_THROWS_AS(build_grid(p, 0.0), std::invalid_argument);
    p.core_halfwidth_sigmas = 5.0;  // too narrow for the shared quadrature window
    CHECK_THROWS_AS(build_grid(p, 1.0), std::invalid_argument);
    p = GridParams{};
    p.tail_ratio = 1.0;
    CHECK_THROWS_AS(build_grid(p, 1.0), std::invalid_argument);
}

TEST_CASE("grid carries the configured smoothing node count") {
    GridParams p;
    p.tail_max_sigmas = 50.0;
    p.hermite_nodes = 128;
    CHECK(build_grid(p, 1.0).hermite_nodes == 128);
}

TEST_CASE("interpolant passes through its data and preserves monotonicity") {
    std::vector<double> xs = {0.0, 1.0, 2.0, 3.5, 4.0};
    std::vector<double> ys = {0.0, 0.1, 0.2, 2.0, 2.05};
    Curve c(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK_THAT(c(xs[i]), WithinAbs(ys[i], 1e-15));
    double prev = c(0.0);
    for (double x = 0.0; x <= 4.0; x += 1e-3) {
        double v = c(x);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    CHECK(c.nondecreasing());
}

TEST_CASE("interpolant does not overshoot flat spans") {
    std::vector<double> xs = {0.0, 1.0, 2.0, 3.0};
    std::vector<double> ys = {0.0, 1.0, 1.0, 5.0};
    Curve c(xs, ys);
    for (double x = 1.0; x <= 2.0; x += 0.01) {
        CHECK(c(x) <= 1.0 + 1e-12);
        CHECK(c(x) >= 1.0 - 1e-12);
    }
}

TEST_CASE("extrapolation modes clamp or extend linearly") {
    std::vector<double> xs = {0.0, 1.0, 2.0};
    std::vector<double> ys = {0.0, 2.0, 3.0};
    Curve clamp(xs, ys, Extrapolation::clamp, Extrapolation::clamp);
    CHECK(clamp(-5.0) == 0.0);
    CHECK(clamp(9.0) == 3.0);
    Curve lin(xs, ys, Extrapolation::linear, Extrapolation::linear);
    CHECK_THAT(lin(-1.0), WithinAbs(-2.0, 1e-14));
    CHECK_THAT(lin(3.0), WithinAbs(4.0, 1e-14));
}

TEST_CASE("declared tail laws drive off-grid evaluation") {
    std::vector<double> xs = {0.0, 1.0, 2.0};
    std::vector<double> ys = {0.0, 1.0, 4.0};
    Curve c(xs, ys, Extrapolation::clamp, Extrapolation::asymptote);
    TailLaw law;
    law.power = true;
    law.coeff = 1.0;
    law.rho_or_invn = 2.0;
    c.set_tail_law(law);
    CHECK_THAT(c(3.0), WithinRel(9.0, 1e-13));
    TailLaw lg;  // 2 sqrt(log x)
    lg.power = false;
    lg.coeff = 2.0;
    lg.rho_or_invn = 0.5;
    c.set_tail_law(lg);
    CHECK_THAT(c(100.0), WithinRel(2.0 * std::sqrt(std::log(100.0)), 1e-13));
}

TEST_CASE("bracket search lands on the enclosing segment") {
    std::vector<double> xs = {0.0, 1.0, 2.0, 4.0};
    CHECK(bisect(xs, -1.0) == 0);
    CHECK(bisect(xs, 0.5) == 0);
    CHECK(bisect(xs, 1.0) == 1);
    CHECK(bisect(xs, 3.9) == 2);
    CHECK(bisect(xs, 99.0) == 2);
}

TEST_CASE("interpolant rejects malformed input") {
    CHECK_THROWS_AS(Curve({1.0}, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Curve({1.0, 2.0}, {2.0}), std::invalid_argument);
}
