#pragma once
#include <algorithm>
#include <cmath>
#include <vector>

#include "lobeq/equilibrium.hpp"

namespace lobeq {

struct OrderBook {
    Grid grid;
    std::vector<double> h_buy, h_sell;  // quoted-value branches on the nodes
    double best_ask = 0.0, best_bid = 0.0;
    double spread() const { return best_ask - best_bid; }
};

// Book from the solved impact curve.  The one-sided limits at zero depth come
// from Richardson extrapolation a tenth of a core step away from the kink.
inline OrderBook build_book(const EquilibriumSolution& sol) {
    OrderBook b;
    b.grid = sol.grid;
    PhiBranches br = phi_map(*sol.dist, sol.grid, sol.F, sol.market.sigma);
    b.h_buy = std::move(br.h_buy);
    b.h_sell = std::move(br.h_sell);
    Curve hb(b.grid.nodes, b.h_buy, Extrapolation::clamp);
    Curve hs(b.grid.nodes, b.h_sell, Extrapolation::clamp);
    double eps = b.grid.core_step / 10.0;
    b.best_ask = 2.0 * hb(eps / 2) - hb(eps);
    b.best_bid = 2.0 * hs(-eps / 2) - hs(-eps);
    return b;
}

// Expected average price per share for a total order x split per the
// equal-treatment weighting: N int_0^1 F(xy) y^{N-1} dy.
inline double implementation_shortfall(const EquilibriumSolution& sol, double x) {
    Curve Fc(sol.grid.nodes, sol.F, Extrapolation::clamp);
    if (x == 0.0) return Fc(0.0);
    int N = sol.market.n_insiders;
    if (N <= 0) return Fc(x);  // infinite-competition limit
    const QuadRule& gj = jacobi01_rule(40, double(N - 1));
    double acc = 0.0;
    for (std::size_t k = 0; k < gj.nodes.size(); ++k)
        acc += gj.weights[k] * Fc(x * gj.nodes[k]);
    return N * acc;
}

// Expected marginal price of the x-th unit: the noise-smoothed book itself.
inline double expected_exec_price(const OrderBook& b, double x) {
    Curve hb(b.grid.nodes, b.h_buy, Extrapolation::clamp);
    Curve hs(b.grid.nodes, b.h_sell, Extrapolation::clamp);
    return convolve_split_at(hb, hs, b.grid.sigma, x, b.grid.hermite_nodes);
}

namespace detail {

// cumulative trapezoid from the zero node in both directions
inline std::vector<double> cumtrapz_from_zero(const Grid& g, const std::vector<double>& f) {
    std::size_t n = g.nodes.size(), i0 = g.zero_index;
    std::vector<double> H(n, 0.0);
    for (std::size_t i = i0 + 1; i < n; ++i)
        H[i] = H[i - 1] + 0.5 * (f[i] + f[i - 1]) * (g.nodes[i] - g.nodes[i - 1]);
    for (std::size_t i = i0; i-- > 0;)
        H[i] = H[i + 1] - 0.5 * (f[i] + f[i + 1]) * (g.nodes[i + 1] - g.nodes[i]);
    return H;
}

}  // namespace detail

// Expected profit of the whole informed side when the signal realizes at v:
// x*(v) (v - IS(x*(v))).  Signals at or past a bounded support end ask for an
// unbounded position; the profit is then the integrated gap between the
// boundary value and the smoothed book, which stays finite.
inline double aggregate_profit(const EquilibriumSolution& sol, const OrderBook& b,
                               double v) {
    const Grid& g = sol.grid;
    double m = sol.dist->support_lo(), M = sol.dist->support_hi();
    if (v >= M || v <= m) {
        Curve hb(g.nodes, b.h_buy, Extrapolation::clamp);
        Curve hs(g.nodes, b.h_sell, Extrapolation::clamp);
        std::size_t i0 = g.zero_index;
        double acc = 0.0;
        if (v >= M) {
            double prev = M - convolve_split_at(hb, hs, g.sigma, 0.0, g.hermite_nodes);
            for (std::size_t i = i0 + 1; i < g.nodes.size(); ++i) {
                double cur = M - convolve_split_at(hb, hs, g.sigma, g.nodes[i], g.hermite_nodes);
                acc += 0.5 * (prev + cur) * (g.nodes[i] - g.nodes[i - 1]);
                prev = cur;
            }
        } else {
            double prev = convolve_split_at(hb, hs, g.sigma, 0.0, g.hermite_nodes) - m;
            for (std::size_t i = i0; i-- > 0;) {
                double cur = convolve_split_at(hb, hs, g.sigma, g.nodes[i], g.hermite_nodes) - m;
                acc += 0.5 * (prev + cur) * (g.nodes[i + 1] - g.nodes[i]);
                prev = cur;
            }
        }
        return acc;
    }
    InvertResult xr = invert(sol, v);
    double x = std::min(std::max(xr.x, g.nodes.front()), g.nodes.back());
    return x * (v - implementation_shortfall(sol, x));
}

struct VolumeTails {
    std::vector<double> informed;  // P(informed demand exceeds the node)
    std::vector<double> total;     // same for informed plus noise
};

inline VolumeTails volume_tail(const EquilibriumSolution& sol) {
    const Grid& g = sol.grid;
    std::size_t n = g.nodes.size();
    VolumeTails vt;
    vt.informed.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        vt.informed[i] = std::exp(sol.dist->log_pi_plus(sol.F[i]));
    Curve ic(g.nodes, vt.informed, Extrapolation::clamp);
    vt.total = convolve(g, ic, sol.market.sigma);
    return vt;
}

// Dealer-side audit: expected cost of filling the whole flow at the quoted
// book minus its value, E[H(X*+Z) - V (X*+Z)]; zero at the true equilibrium.
// The signal average uses atoms outright or a quantile-mapped Hermite rule;
// the noise average honors the book kink via the split window.
inline double lp_profit_check(const EquilibriumSolution& sol, const OrderBook& b) {
    const Grid& g = sol.grid;
    std::vector<double> Hb = detail::cumtrapz_from_zero(g, b.h_buy);
    std::vector<double> Hs = detail::cumtrapz_from_zero(g, b.h_sell);

    auto contribution = [&](double v) {
        InvertResult xr = invert(sol, v);
        double x = std::min(std::max(xr.x, g.nodes.front()), g.nodes.back());
        std::vector<double> cb(g.nodes.size()), cs(g.nodes.size());
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            cb[i] = Hb[i] - v * g.nodes[i];
            cs[i] = Hs[i] - v * g.nodes[i];
        }
        Curve curve_b(g.nodes, cb, Extrapolation::linear);
        Curve curve_s(g.nodes, cs, Extrapolation::linear);
        return convolve_split_at(curve_b, curve_s, g.sigma, x, g.hermite_nodes);
    };

    if (sol.dist->discrete()) {
        double acc = 0.0;
        for (const auto& a : sol.dist->atoms()) acc += a.prob * contribution(a.value);
        return acc;
    }
    const QuadRule& gh = hermite_rule(200);
    double acc = 0.0;
    for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
        double p = normal_cdf(kSqrt2 * gh.nodes[k]);
        p = std::min(std::max(p, 1e-15), 1.0 - 1e-15);
        acc += gh.weights[k] * contribution(sol.dist->quantile(p));
    }
    return acc / std::sqrt(M_PI);
}

}  // namespace lobeq
