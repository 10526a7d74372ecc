#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "lobeq/asymptotics.hpp"

using namespace lobeq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("heavy-tail growth indices follow the trader-count formula") {
    DistPtr st = make_distribution("student", {{"alpha", 3.0}});
    // s = 1.5, rho = (s-1)/(1 - s/N)
    AsymptoticPrediction p2 = predict(*st, 2, Side::upper);
    CHECK(p2.regime == PredictRegime::power_law);
    CHECK_THAT(p2.exponent, WithinRel(2.0, 1e-12));
    CHECK_THAT(p2.is_ratio, WithinRel(0.5, 1e-12));
    CHECK_THAT(p2.vol_exponent, WithinRel(6.0, 1e-12));

    CHECK_THAT(predict(*st, 3, Side::upper).exponent, WithinRel(1.0, 1e-12));
    AsymptoticPrediction p25 = predict(*st, 25, Side::upper);
    CHECK_THAT(p25.exponent, WithinRel(0.5 / 0.94, 1e-12));
    CHECK_THAT(p25.is_ratio, WithinRel(0.9791666666666666, 1e-10));

    // the growth index falls toward s - 1 as competition thickens
    double prev = kInf;
    for (int N : {2, 3, 5, 10, 25, 100}) {
        double e = predict(*st, N, Side::upper).exponent;
        CHECK(e < prev);
        CHECK(e > 0.5);
        prev = e;
    }
}

TEST_CASE("too few traders against a heavy tail is flagged infeasible") {
    DistPtr st = make_distribution("student", {{"alpha", 3.0}});
    AsymptoticPrediction p = predict(*st, 1, Side::upper);
    CHECK(p.regime == PredictRegime::none);
    CHECK(!p.feasible);
    CHECK(!p.note.empty());
}

TEST_CASE("flat gaussian tails produce the square-root log law") {
    DistPtr gs = make_distribution("gaussian", {{"Sigma", 0.01}});
    AsymptoticPrediction p = predict(*gs, 25, Side::upper);
    CHECK(p.regime == PredictRegime::log_law);
    CHECK_THAT(p.exponent, WithinRel(0.5, 1e-12));
    CHECK_THAT(p.constant, WithinRel(0.14433756729740643, 1e-12));
    CHECK_THAT(p.is_ratio, WithinRel(1.0, 1e-12));

    // dilating the signal dilates the predicted coefficient
    DistPtr big = make_distribution("gaussian", {{"Sigma", 0.01}, {"scale", 2.0}});
    CHECK_THAT(predict(*big, 25, Side::upper).constant, WithinRel(2.0 * p.constant, 1e-10));

    // one trader keeps the exponent but loses the averaged-tail constant
    AsymptoticPrediction p1 = predict(*gs, 1, Side::upper);
    CHECK(p1.regime == PredictRegime::heuristic);
    CHECK_THAT(p1.exponent, WithinRel(0.5, 1e-12));
    CHECK(p1.constant == 0.0);
    CHECK(!p1.note.empty());
}

TEST_CASE("exponential upper tail yields the linear law with exact coefficient") {
    DistPtr ex = make_distribution("exponential", {{"lambda", 1.0}});
    AsymptoticPrediction up = predict(*ex, 2, Side::upper);
    CHECK(up.regime == PredictRegime::log_law);
    CHECK_THAT(up.exponent, WithinRel(1.0, 1e-12));
    CHECK_THAT(up.constant, WithinRel(2.0, 1e-12));

    // the bounded lower side decays like a power of the distance to the floor
    AsymptoticPrediction dn = predict(*ex, 2, Side::lower);
    CHECK(dn.regime == PredictRegime::power_law);
    CHECK_THAT(dn.exponent, WithinRel(-2.0 / 3.0, 1e-12));
    CHECK_THAT(dn.vol_exponent, WithinRel(2.0, 1e-12));
}

TEST_CASE("bounded laws decay toward the support end at the predicted rate") {
    DistPtr tg = make_distribution("truncated_gaussian", {{"Sigma", 1.0}, {"M", 2.0}});
    AsymptoticPrediction p = predict(*tg, 25, Side::upper);
    CHECK(p.regime == PredictRegime::power_law);
    CHECK_THAT(p.exponent, WithinRel(-0.5102040816326531, 1e-12));
    CHECK_THAT(p.vol_exponent, WithinRel(2.0, 1e-12));
}

TEST_CASE("laws without a usable registry tail degrade gracefully") {
    AsymptoticPrediction disc = predict(*make_distribution("trinomial"), 2, Side::upper);
    CHECK(disc.regime == PredictRegime::none);
    CHECK(disc.note.find("atomic") != std::string::npos);

    AsymptoticPrediction ln =
        predict(*make_distribution("lognormal", {{"Sigma", 0.01}}), 2, Side::upper);
    CHECK(ln.regime == PredictRegime::none);

    AsymptoticPrediction lg =
        predict(*make_distribution("logit_normal", {{"Sigma", 0.02}}), 2, Side::upper);
    CHECK(lg.regime == PredictRegime::heuristic);
    CHECK_THAT(lg.vol_exponent, WithinRel(2.0, 1e-12));
}

TEST_CASE("tail fitting recovers synthetic exponents") {
    std::vector<double> xs, p, l;
    for (int i = 0; i < 220; ++i) {
        double x = 1.1 * std::pow(10.0, 4.0 * i / 219.0);
        xs.push_back(x);
        p.push_back(3.0 * std::pow(x, -2.5));
        l.push_back(0.7 * std::pow(std::log(x), 0.5));
    }
    FitResult fp = fit_tail_exponent(xs, p, FitMode::loglog);
    CHECK_THAT(fp.slope, WithinAbs(-2.5, 1e-9));
    CHECK(fp.n_points >= 40);
    CHECK(fp.window_hi > fp.window_lo);

    FitResult fl = fit_tail_exponent(xs, l, FitMode::logloglog);
    CHECK_THAT(fl.slope, WithinAbs(0.5, 1e-9));
}

TEST_CASE("validation machinery confirms an exact power-law impact curve") {
    // hand-built solution with F = 0.01 x |x| over a wide grid; for two traders
    // against the 1.5-slope tail this is exactly the predicted growth
    GridParams gp;
    gp.tail_max_sigmas = 1e4;
    EquilibriumSolution sol;
    sol.grid = build_grid(gp, 1.0);
    sol.dist = make_distribution("student", {{"alpha", 3.0}});
    sol.market = MarketParams{2, 1.0};
    sol.status = SolveStatus::converged;
    sol.F.resize(sol.grid.size());
    for (std::size_t i = 0; i < sol.F.size(); ++i) {
        double x = sol.grid.nodes[i];
        sol.F[i] = 0.01 * x * std::abs(x);
    }

    std::vector<ValidationEntry> entries = validate(sol, Side::upper);
    REQUIRE(entries.size() >= 1);
    CHECK(entries[0].quantity == "impact growth");
    CHECK_THAT(entries[0].fitted, WithinAbs(2.0, 1e-6));
    CHECK(entries[0].ok);
    if (entries.size() > 1) {
        CHECK(entries[1].quantity == "total volume tail");
        CHECK_THAT(entries[1].fitted, WithinAbs(6.0, 0.6));
        CHECK(entries[1].ok);
    }

    IsRatioCheck ir = is_ratio_check(sol, Side::upper);
    REQUIRE(ir.applicable);
    CHECK_THAT(ir.measured, WithinAbs(0.5, 0.01));

    // no power prediction for the gaussian family, so the ratio check opts out
    EquilibriumSolution g = sol;
    g.dist = make_distribution("gaussian", {{"Sigma", 1.0}});
    CHECK(!is_ratio_check(g, Side::upper).applicable);
}
