#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "lobeq/book.hpp"

using namespace lobeq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
GridParams fast_grid(double tail = 50.0) {
    GridParams gp;
    gp.tail_max_sigmas = tail;
    return gp;
}
}  // namespace

TEST_CASE("average fill price of a linear impact curve has the exact moment") {
    GridParams gp = fast_grid(30.0);
    EquilibriumSolution sol;
    sol.grid = build_grid(gp, 1.0);
    sol.F.resize(sol.grid.size());
    for (std::size_t i = 0; i < sol.F.size(); ++i) sol.F[i] = 0.7 * sol.grid.nodes[i];
    for (int N : {1, 2}) {
        sol.market = MarketParams{N, 1.0};
        for (double x : {0.5, 2.0, 10.0, -3.0}) {
            double want = 0.7 * x * N / (N + 1.0);
            CHECK_THAT(implementation_shortfall(sol, x), WithinAbs(want, 1e-9));
        }
        CHECK(implementation_shortfall(sol, 0.0) == 0.0);
    }
}

TEST_CASE("three-point market quotes the classic two-thirds touch") {
    EquilibriumSolution sol = solve(make_distribution("trinomial"), {2, 1.0}, fast_grid());
    REQUIRE(sol.status == SolveStatus::converged);
    OrderBook bk = build_book(sol);
    CHECK_THAT(bk.spread(), WithinAbs(4.0 / 3.0, 1e-3));
    CHECK_THAT(bk.best_ask + bk.best_bid, WithinAbs(0.0, 1e-9));
    CHECK(bk.best_ask > 0.0);

    // smoothed book equals N F - (N-1) IS at the fixed point; the slack covers
    // the trapezoid-vs-Jacobi quadrature gap between the two IS evaluations
    Curve Fc(sol.grid.nodes, sol.F);
    for (double x : {0.5, 1.0, 2.0, -1.0}) {
        double exec = expected_exec_price(bk, x);
        double mixed = 2.0 * Fc(x) - implementation_shortfall(sol, x);
        CHECK_THAT(exec, WithinAbs(mixed, 2e-5));
    }
    // marginal price concedes more than the average impact on the way up
    CHECK(expected_exec_price(bk, 1.0) > Fc(1.0));
}

TEST_CASE("single-trader execution price collapses onto the impact curve") {
    EquilibriumSolution sol = solve(make_distribution("trinomial"), {1, 1.0}, fast_grid());
    REQUIRE(sol.status == SolveStatus::converged);
    OrderBook bk = build_book(sol);
    Curve Fc(sol.grid.nodes, sol.F);
    for (double x : {0.5, 1.5, -2.0})
        CHECK_THAT(expected_exec_price(bk, x), WithinAbs(Fc(x), 1e-6));
}

TEST_CASE("two-point signal prices at the revealed values") {
    for (int N : {1, 2, 25}) {
        EquilibriumSolution sol = solve(make_distribution("bernoulli"), {N, 1.0}, fast_grid());
        REQUIRE(sol.status == SolveStatus::converged);
        OrderBook bk = build_book(sol);
        for (std::size_t i = 0; i < bk.h_buy.size(); i += 61) {
            CHECK_THAT(bk.h_buy[i], WithinAbs(1.0, 1e-10));
            CHECK_THAT(bk.h_sell[i], WithinAbs(-1.0, 1e-10));
        }
        CHECK_THAT(bk.spread(), WithinAbs(2.0, 1e-6));
        // boundary-signal profit integrates the gap to the smoothed book,
        // which is the half-normal mean regardless of the trader count
        double p = aggregate_profit(sol, bk, 1.0);
        CHECK_THAT(p, WithinAbs(std::sqrt(2.0 / M_PI), 1e-3));
    }
}

TEST_CASE("profit vanishes on a null signal and is positive on an informative one") {
    EquilibriumSolution sol = solve(make_distribution("trinomial"), {2, 1.0}, fast_grid());
    REQUIRE(sol.status == SolveStatus::converged);
    OrderBook bk = build_book(sol);
    CHECK_THAT(aggregate_profit(sol, bk, 0.0), WithinAbs(0.0, 1e-8));
    double up = aggregate_profit(sol, bk, 0.5);
    double dn = aggregate_profit(sol, bk, -0.5);
    CHECK(up > 0.0);
    CHECK(dn > 0.0);  // the short side earns too
    CHECK_THAT(dn, WithinAbs(up, 1e-6));
}

TEST_CASE("volume tails are proper nonincreasing probabilities") {
    EquilibriumSolution sol = solve(make_distribution("trinomial"), {2, 1.0}, fast_grid());
    REQUIRE(sol.status == SolveStatus::converged);
    VolumeTails vt = volume_tail(sol);
    // between the middle and top atoms only the top one remains reachable
    CHECK_THAT(vt.informed[sol.grid.zero_index + 50], WithinRel(1.0 / 3.0, 1e-10));
    CHECK_THAT(vt.informed[sol.grid.zero_index - 50], WithinRel(2.0 / 3.0, 1e-10));
    for (std::size_t i = 0; i < vt.total.size(); ++i) {
        CHECK(vt.total[i] >= -1e-12);
        CHECK(vt.total[i] <= 1.0 + 1e-12);
        if (i > 0) {
            CHECK(vt.informed[i] <= vt.informed[i - 1] + 1e-12);
            CHECK(vt.total[i] <= vt.total[i - 1] + 1e-10);
        }
    }
}

TEST_CASE("dealer profit audit is flat at the fixed point") {
    EquilibriumSolution sol = solve(make_distribution("trinomial"), {2, 1.0}, fast_grid());
    REQUIRE(sol.status == SolveStatus::converged);
    OrderBook bk = build_book(sol);
    CHECK_THAT(lp_profit_check(sol, bk), WithinAbs(0.0, 1e-4));
}
