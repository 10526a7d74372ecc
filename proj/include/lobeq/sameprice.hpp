#pragma once
#include <cmath>
#include <vector>

#include "lobeq/equilibrium.hpp"

namespace lobeq {

enum class SamePriceStatus { converged, max_iter, diverged, nonmonotone };

struct SamePriceSolution {
    Grid grid;
    std::vector<double> F;
    std::vector<double> history;
    SamePriceStatus status = SamePriceStatus::max_iter;
    bool monotone_ok = false;
    int iterations = 0;
    DistPtr dist;
    MarketParams market;
};

// Single-clearing-price execution: every share fills at the book price of the
// realized total, so the map splits into the smoothed running average of the
// branch values plus a market-power correction from their deviation,
//   T F(x) = (q * hbar)(x) + x (q * s)(x) / N,
// with, on each side of the kink, hbar(w) = (1/w) int_0^w h and
// s(w) = (h(w) - hbar(w)) / w (half the branch slope in the w -> 0 limit).
inline std::vector<double> apply_T_sameprice(const SignalDistribution& dist, const Grid& g,
                                             const std::vector<double>& F,
                                             const MarketParams& mp) {
    PhiBranches br = phi_map(dist, g, F, mp.sigma);
    std::size_t n = g.nodes.size(), i0 = g.zero_index;
    std::vector<double> hbar_b(n), hbar_s(n), s_b(n), s_s(n);

    double cum = 0.0;
    hbar_b[i0] = br.h_buy[i0];
    for (std::size_t i = i0 + 1; i < n; ++i) {
        cum += 0.5 * (br.h_buy[i] + br.h_buy[i - 1]) * (g.nodes[i] - g.nodes[i - 1]);
        hbar_b[i] = cum / g.nodes[i];
    }
    cum = 0.0;
    hbar_s[i0] = br.h_sell[i0];
    for (std::size_t i = i0; i-- > 0;) {
        cum -= 0.5 * (br.h_sell[i] + br.h_sell[i + 1]) * (g.nodes[i + 1] - g.nodes[i]);
        hbar_s[i] = cum / g.nodes[i];
    }
    s_b[i0] = 0.5 * (br.h_buy[i0 + 1] - br.h_buy[i0]) / (g.nodes[i0 + 1] - g.nodes[i0]);
    for (std::size_t i = i0 + 1; i < n; ++i)
        s_b[i] = (br.h_buy[i] - hbar_b[i]) / g.nodes[i];
    s_s[i0] = 0.5 * (br.h_sell[i0] - br.h_sell[i0 - 1]) / (g.nodes[i0] - g.nodes[i0 - 1]);
    for (std::size_t i = 0; i < i0; ++i)
        s_s[i] = (br.h_sell[i] - hbar_s[i]) / g.nodes[i];
    for (std::size_t i = 0; i < i0; ++i) {
        hbar_b[i] = hbar_b[i0];
        s_b[i] = s_b[i0];
    }
    for (std::size_t i = i0 + 1; i < n; ++i) {
        hbar_s[i] = hbar_s[i0];
        s_s[i] = s_s[i0];
    }

    Curve cb(g.nodes, hbar_b, Extrapolation::clamp);
    Curve cs(g.nodes, hbar_s, Extrapolation::clamp);
    Curve db(g.nodes, s_b, Extrapolation::clamp);
    Curve ds(g.nodes, s_s, Extrapolation::clamp);
    std::vector<double> out(n);
    double invN = 1.0 / mp.n_insiders;
    parallel_for(n, [&](std::size_t i) {
        double x = g.nodes[i];
        double qh = convolve_split_at(cb, cs, mp.sigma, x, g.hermite_nodes);
        double qs = convolve_split_at(db, ds, mp.sigma, x, g.hermite_nodes);
        out[i] = qh + x * qs * invN;
    });
    return out;
}

inline SamePriceSolution solve_sameprice(DistPtr dist, const MarketParams& mp,
                                         const GridParams& gp = {},
                                         const SolveControls& sc = {}) {
    Grid g = build_grid(gp, mp.sigma);
    std::vector<double> F0 = initial_guess(*dist, g, mp.sigma);
    auto step = [&](const std::vector<double>& F) {
        return apply_T_sameprice(*dist, g, F, mp);
    };
    EquilibriumSolution raw = detail::iterate(*dist, g, std::move(F0), sc, step);

    SamePriceSolution sol;
    sol.grid = std::move(raw.grid);
    sol.F = std::move(raw.F);
    sol.history = std::move(raw.history);
    sol.iterations = raw.iterations;
    sol.dist = dist;
    sol.market = mp;

    double range = 0.0;
    for (std::size_t i = 0; i < sol.F.size(); ++i)
        range = std::max(range, std::abs(sol.F[i]));
    sol.monotone_ok = true;
    for (std::size_t i = 1; i < sol.F.size(); ++i)
        if (sol.F[i] < sol.F[i - 1] - 1e-9 * std::max(range, 1.0)) {
            sol.monotone_ok = false;
            break;
        }

    switch (raw.status) {
        case SolveStatus::converged:
            sol.status = sol.monotone_ok ? SamePriceStatus::converged
                                         : SamePriceStatus::nonmonotone;
            break;
        case SolveStatus::diverged:
            sol.status = SamePriceStatus::diverged;
            break;
        default:
            sol.status = SamePriceStatus::max_iter;
    }
    return sol;
}

}  // namespace lobeq
