#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "lobeq/convolve.hpp"
#include "lobeq/equilibrium.hpp"
#include "lobeq/grid.hpp"

using namespace lobeq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
Grid small_grid(double sigma = 1.0) {
    GridParams gp;
    gp.tail_max_sigmas = 30.0;
    return build_grid(gp, sigma);
}
}  // namespace

TEST_CASE("window-averaged gaussian kernel matches closed form") {
    // (Phi(1) - Phi(-1)) / 2
    CHECK_THAT(averaged_kernel(1.0, 2.0, 1.0), WithinRel(0.34134474606854293, 1e-13));
    // zero-width limit collapses to the density
    CHECK_THAT(averaged_kernel(1.0, 0.0, 0.7), WithinRel(gaussian_density(1.0, 0.7), 1e-15));
    CHECK_THAT(averaged_kernel(2.0, 0.0, 0.0), WithinRel(normal_pdf(0.0) / 2.0, 1e-15));
}

TEST_CASE("gaussian smoothing preserves constants and linear functions") {
    Grid g = small_grid();
    std::vector<double> cvals(g.nodes.size(), 3.25);
    Curve cst(g.nodes, cvals);
    std::vector<double> out = convolve(g, cst, 1.0);
    for (std::size_t i = 0; i < g.nodes.size(); i += 37)
        CHECK_THAT(out[i], WithinRel(3.25, 1e-12));

    Curve ident(g.nodes, g.nodes, Extrapolation::linear, Extrapolation::linear);
    std::vector<double> lin = convolve(g, ident, 1.0);
    for (double x : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
        std::size_t i = std::lower_bound(g.nodes.begin(), g.nodes.end(), x - 1e-12) -
                        g.nodes.begin();
        CHECK_THAT(lin[i], WithinAbs(g.nodes[i], 1e-10));
    }
}

TEST_CASE("split smoothing of the sign branches gives the gaussian error function") {
    auto buy = [](double) { return 1.0; };
    auto sell = [](double) { return -1.0; };
    for (double x : {0.0, 0.25, 0.5, 1.0, 2.0, 5.0}) {
        double want = std::erf(x / kSqrt2);
        CHECK_THAT(convolve_split_at(buy, sell, 1.0, x), WithinAbs(want, 1e-12));
        CHECK_THAT(convolve_split_at(buy, sell, 1.0, -x), WithinAbs(-want, 1e-12));
    }
    // far field routes through a single branch and saturates exactly
    CHECK_THAT(convolve_split_at(buy, sell, 1.0, 17.0), WithinAbs(1.0, 1e-14));
    CHECK_THAT(convolve_split_at(buy, sell, 1.0, -17.0), WithinAbs(-1.0, 1e-14));
    // noise scale covariance
    CHECK_THAT(convolve_split_at(buy, sell, 2.0, 1.0),
               WithinAbs(std::erf(0.5 / kSqrt2), 1e-12));
}

TEST_CASE("split smoothing is exact on a continuous linear book") {
    auto id = [](double z) { return z; };
    for (double x : {-3.0, -1.0, 0.0, 0.4, 2.5})
        CHECK_THAT(convolve_split_at(id, id, 1.0, x), WithinAbs(x, 1e-10));
}

TEST_CASE("running average handles constants, linear ramps, and the origin") {
    Grid g = small_grid();
    std::vector<double> c(g.nodes.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2.0;
    std::vector<double> avg = cumulative_average(g, c);
    for (std::size_t i = 0; i < c.size(); i += 53) CHECK_THAT(avg[i], WithinRel(2.0, 1e-12));

    for (std::size_t i = 0; i < c.size(); ++i) c[i] = g.nodes[i];
    avg = cumulative_average(g, c);
    CHECK(avg[g.zero_index] == 0.0);  // x -> 0 limit is c(0)
    for (std::size_t i = 0; i < c.size(); i += 53) {
        if (i == g.zero_index) continue;
        CHECK_THAT(avg[i], WithinAbs(0.5 * g.nodes[i], 1e-10));
    }
}

TEST_CASE("trader-count mixing matches the closed form for a smoothed sign book") {
    Grid g = small_grid();
    double s = 1.0;
    std::vector<double> C(g.nodes.size());
    for (std::size_t i = 0; i < C.size(); ++i) C[i] = std::erf(g.nodes[i] / (kSqrt2 * s));

    std::vector<double> one = detail::combine_with_average(g, C, 1, false);
    CHECK(one == C);  // single trader has no averaged component

    int N = 2;
    std::vector<double> mixed = detail::combine_with_average(g, C, N, false);
    std::vector<double> lim = detail::combine_with_average(g, C, N, true);
    double root = std::sqrt(2.0 / M_PI);
    for (double x : {0.3, 1.0, 2.0, -1.5}) {
        std::size_t i = std::lower_bound(g.nodes.begin(), g.nodes.end(), x - 1e-12) -
                        g.nodes.begin();
        double xx = g.nodes[i];
        double cf = std::erf(xx / (kSqrt2 * s));
        double af = cf + s * root * (std::exp(-xx * xx / (2 * s * s)) - 1.0) / xx;
        CHECK_THAT(mixed[i], WithinAbs(cf / N + (N - 1.0) / N * af, 5e-5));
        CHECK_THAT(lim[i], WithinAbs(af, 5e-5));
    }
}

TEST_CASE("quantile-matched starting curve is monotone and support-respecting") {
    Grid g = small_grid();
    DistPtr cont = make_distribution("lognormal", {{"Sigma", 0.04}});
    std::vector<double> F = initial_guess(*cont, g, 1.0);
    for (std::size_t i = 1; i < F.size(); ++i) CHECK(F[i] >= F[i - 1]);
    CHECK(F.front() > cont->support_lo());
    CHECK_THAT(F[g.zero_index], WithinAbs(cont->quantile(0.5), 1e-12));

    DistPtr disc = make_distribution("bernoulli");
    std::vector<double> D = initial_guess(*disc, g, 1.0);
    CHECK(D.front() > -1.0);
    CHECK(D.back() < 1.0);
    CHECK_THAT(D[g.zero_index], WithinAbs(0.0, 1e-12));
}
