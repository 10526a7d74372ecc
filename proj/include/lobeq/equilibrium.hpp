#pragma once
#include <algorithm>
#include <cmath>
#include <vector>

#include "lobeq/convolve.hpp"
#include "lobeq/grid.hpp"
#include "lobeq/interp.hpp"
#include "lobeq/signals.hpp"

namespace lobeq {

struct MarketParams {
    int n_insiders = 1;
    double sigma = 1.0;
};

struct SolveControls {
    double tol = 1e-8;
    int max_iter = 500;
    double damping = 0.0;
};

enum class SolveStatus { converged, max_iter, diverged };

struct EquilibriumSolution {
    Grid grid;
    std::vector<double> F;
    std::vector<double> history;  // sup-distance per iteration
    SolveStatus status = SolveStatus::max_iter;
    int iterations = 0;
    DistPtr dist;
    MarketParams market;
};

struct PhiBranches {
    std::vector<double> h_buy, h_sell;
};

// Conditional-value branches given the candidate impact curve F: each is the
// ratio of noise-smoothed tail functionals of the signal law evaluated along
// F.  Discrete laws smooth exact step functions; continuous laws accumulate
// the quadrature in log space so deep tails keep their relative accuracy.
inline PhiBranches phi_map(const SignalDistribution& dist, const Grid& g,
                           const std::vector<double>& F, double sigma) {
    std::size_t n = g.nodes.size();
    PhiBranches out;
    out.h_buy.assign(n, 0.0);
    out.h_sell.assign(n, 0.0);

    if (dist.discrete()) {
        const auto& atoms = dist.atoms();
        std::size_t K = atoms.size();
        // crossing points of F through each atom value (+-inf when off range)
        std::vector<double> bounds(K + 2);
        bounds[0] = kNegInf;
        bounds[K + 1] = kInf;
        for (std::size_t k = 0; k < K; ++k) {
            double v = atoms[k].value;
            if (v <= F.front())
                bounds[k + 1] = kNegInf;
            else if (v >= F.back())
                bounds[k + 1] = kInf;
            else {
                std::size_t j = 0;
                while (F[j + 1] < v) ++j;
                double sp = F[j + 1] - F[j];
                double w = sp > 0 ? (v - F[j]) / sp : 0.5;
                bounds[k + 1] = g.nodes[j] + w * (g.nodes[j + 1] - g.nodes[j]);
            }
        }
        std::vector<double> piL(K + 1, 0.0), phL(K + 1, 0.0);
        for (std::size_t j = K; j-- > 0;) {
            piL[j] = piL[j + 1] + atoms[j].prob;
            phL[j] = phL[j + 1] + atoms[j].value * atoms[j].prob;
        }
        double mean = dist.mean();
        parallel_for(n, [&](std::size_t i) {
            double y = g.nodes[i];
            double nb = 0, db = 0, ns = 0, ds = 0;
            for (std::size_t j = 0; j <= K; ++j) {
                double cl = std::isfinite(bounds[j]) ? normal_cdf((y - bounds[j]) / sigma)
                                                     : (bounds[j] < 0 ? 1.0 : 0.0);
                double cr = std::isfinite(bounds[j + 1])
                                ? normal_cdf((y - bounds[j + 1]) / sigma)
                                : (bounds[j + 1] < 0 ? 1.0 : 0.0);
                double c = cl - cr;
                nb += c * phL[j];
                db += c * piL[j];
                ns += c * (mean - phL[j]);
                ds += c * (1.0 - piL[j]);
            }
            out.h_buy[i] = nb / std::max(db, 1e-300);
            out.h_sell[i] = ns / std::max(ds, 1e-300);
        });
        return out;
    }

    Curve Fc(g.nodes, F, Extrapolation::clamp);
    const QuadRule& gh = hermite_rule(g.hermite_nodes);
    std::size_t m = gh.nodes.size();
    std::vector<double> lw(m);
    for (std::size_t k = 0; k < m; ++k) lw[k] = std::log(gh.weights[k]);
    double mean = dist.mean();

    parallel_for(n, [&](std::size_t i) {
        double z = g.nodes[i];
        double mb = kNegInf, db = kNegInf, ms = kNegInf, ds = kNegInf;
        std::vector<double> tb(m), tdb(m), ts(m), tds(m);
        for (std::size_t k = 0; k < m; ++k) {
            double f = Fc(z + kSqrt2 * sigma * gh.nodes[k]);
            tb[k] = lw[k] + dist.log_phi_plus(f);
            tdb[k] = lw[k] + dist.log_pi_plus(f);
            ts[k] = lw[k] + dist.log_nphi_minus(f);
            tds[k] = lw[k] + dist.log_pi_minus(f);
            mb = std::max(mb, tb[k]);
            db = std::max(db, tdb[k]);
            ms = std::max(ms, ts[k]);
            ds = std::max(ds, tds[k]);
        }
        auto lse = [&](const std::vector<double>& t, double mx) {
            if (mx == kNegInf) return kNegInf;
            double s = 0;
            for (std::size_t k = 0; k < m; ++k) s += std::exp(t[k] - mx);
            return mx + std::log(s);
        };
        double lnb = lse(tb, mb), ldb = lse(tdb, db);
        double lns = lse(ts, ms), lds = lse(tds, ds);
        // ratios of centered partial moments, recentered afterward; a fully
        // underflowed denominator means the window sits past the support end
        out.h_buy[i] = (ldb == kNegInf) ? dist.support_hi() : mean + std::exp(lnb - ldb);
        out.h_sell[i] = (lds == kNegInf) ? dist.support_lo() : mean - std::exp(lns - lds);
    });
    return out;
}

namespace detail {

// combine the smoothed book C with its running average per the trader count
inline std::vector<double> combine_with_average(const Grid& g, std::vector<double> C,
                                                int N, bool limit) {
    if (!limit && N == 1) return C;
    std::vector<double> avg = cumulative_average(g, C);
    if (limit) return avg;
    std::vector<double> out(C.size());
    double a = 1.0 / N, b = double(N - 1) / N;
    for (std::size_t i = 0; i < C.size(); ++i) out[i] = a * C[i] + b * avg[i];
    return out;
}

inline std::vector<double> assemble_T(const Grid& g, const PhiBranches& br, double sigma,
                                      int N, bool limit) {
    Curve hb(g.nodes, br.h_buy, Extrapolation::clamp);
    Curve hs(g.nodes, br.h_sell, Extrapolation::clamp);
    return combine_with_average(g, convolve(g, hb, hs, sigma), N, limit);
}

}  // namespace detail

inline std::vector<double> apply_T(const SignalDistribution& dist, const Grid& g,
                                   const std::vector<double>& F, const MarketParams& mp) {
    PhiBranches br = phi_map(dist, g, F, mp.sigma);
    return detail::assemble_T(g, br, mp.sigma, mp.n_insiders, false);
}

inline std::vector<double> apply_T_limit(const SignalDistribution& dist, const Grid& g,
                                         const std::vector<double>& F, double sigma) {
    PhiBranches br = phi_map(dist, g, F, sigma);
    return detail::assemble_T(g, br, sigma, 1, true);
}

// Quantile-matched start: push the noise law through the signal quantile for
// continuous laws; an affine wiggle strictly inside the support for discrete.
inline std::vector<double> initial_guess(const SignalDistribution& dist, const Grid& g,
                                         double sigma) {
    std::size_t n = g.nodes.size();
    std::vector<double> F(n);
    if (dist.discrete()) {
        double mid = 0.5 * (dist.support_lo() + dist.support_hi());
        double half = 0.5 * (dist.support_hi() - dist.support_lo());
        for (std::size_t i = 0; i < n; ++i)
            F[i] = mid + 0.995 * half * (2.0 * normal_cdf(g.nodes[i] / sigma) - 1.0);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double p = std::min(std::max(normal_cdf(g.nodes[i] / sigma), 1e-9), 1.0 - 1e-9);
            F[i] = dist.quantile(p);
        }
    }
    return F;
}

namespace detail {

inline double blowup_radius(const SignalDistribution& dist) {
    double range = dist.quantile(1.0 - 1e-6) - dist.quantile(1e-6);
    return 10.0 * std::max(range, 1.0);
}

template <class Step>
EquilibriumSolution iterate(const SignalDistribution& dist, const Grid& g,
                            std::vector<double> F, const SolveControls& sc,
                            const Step& step) {
    EquilibriumSolution sol;
    sol.grid = g;
    // Genuine divergence shows up as multiplicative growth in the core; the
    // far tail of a heavy-tailed equilibrium legitimately dwarfs the signal
    // quantiles, so the escape radius is only enforced inside the core window.
    double radius = blowup_radius(dist);
    double core = g.core_step * 50.0 * 12.0;  // conservative core half-width
    std::size_t lo = 0, hi = g.nodes.size();
    while (lo < g.zero_index && g.nodes[lo] < -core) ++lo;
    while (hi > g.zero_index && g.nodes[hi - 1] > core) --hi;
    int rising = 0;
    double last_d = kInf;
    for (int it = 1; it <= sc.max_iter; ++it) {
        std::vector<double> Fn = step(F);
        if (sc.damping > 0.0)
            for (std::size_t i = 0; i < Fn.size(); ++i)
                Fn[i] = (1.0 - sc.damping) * Fn[i] + sc.damping * F[i];
        double d = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < Fn.size(); ++i) {
            if (!std::isfinite(Fn[i])) {
                finite = false;
                break;
            }
            d = std::max(d, std::abs(Fn[i] - F[i]) / std::max(1.0, std::abs(F[i])));
        }
        double core_max = 0.0;
        for (std::size_t i = lo; i < hi; ++i) core_max = std::max(core_max, std::abs(Fn[i]));
        sol.history.push_back(d);
        sol.iterations = it;
        F = std::move(Fn);
        if (!finite || core_max > radius) {
            sol.status = SolveStatus::diverged;
            sol.F = std::move(F);
            return sol;
        }
        rising = (d > last_d) ? rising + 1 : 0;
        last_d = d;
        if (rising >= 20) {
            sol.status = SolveStatus::diverged;
            sol.F = std::move(F);
            return sol;
        }
        if (d <= sc.tol) {
            sol.status = SolveStatus::converged;
            sol.F = std::move(F);
            return sol;
        }
    }
    sol.status = SolveStatus::max_iter;
    sol.F = std::move(F);
    return sol;
}

}  // namespace detail

inline EquilibriumSolution solve(DistPtr dist, const MarketParams& mp,
                                 const GridParams& gp = {}, const SolveControls& sc = {}) {
    Grid g = build_grid(gp, mp.sigma);
    std::vector<double> F0 = initial_guess(*dist, g, mp.sigma);
    auto step = [&](const std::vector<double>& F) { return apply_T(*dist, g, F, mp); };
    EquilibriumSolution sol = detail::iterate(*dist, g, std::move(F0), sc, step);
    sol.dist = dist;
    sol.market = mp;
    return sol;
}

// Infinite-competition limit: only the running average term survives.
inline EquilibriumSolution solve_limit(DistPtr dist, double sigma,
                                       const GridParams& gp = {},
                                       const SolveControls& sc = {}) {
    Grid g = build_grid(gp, sigma);
    std::vector<double> F0 = initial_guess(*dist, g, sigma);
    auto step = [&](const std::vector<double>& F) {
        return apply_T_limit(*dist, g, F, sigma);
    };
    EquilibriumSolution sol = detail::iterate(*dist, g, std::move(F0), sc, step);
    sol.dist = dist;
    sol.market = MarketParams{0, sigma};
    return sol;
}

struct InvertResult {
    double x = 0.0;
    bool extrapolated = false;
};

// Demand map: x with F(x) = v.  Values at or beyond the support ends mean the
// trader would take an unbounded position; values inside the support but off
// the sampled range are clamped to the grid edge and flagged.
inline InvertResult invert(const EquilibriumSolution& sol, double v) {
    InvertResult r;
    const auto& F = sol.F;
    const auto& xs = sol.grid.nodes;
    if (v <= sol.dist->support_lo()) return {kNegInf, true};
    if (v >= sol.dist->support_hi()) return {kInf, true};
    if (v <= F.front()) return {xs.front(), true};
    if (v >= F.back()) return {xs.back(), true};
    std::size_t lo = 0, hi = F.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (F[mid] <= v ? lo : hi) = mid;
    }
    double span = F[lo + 1] - F[lo];
    double w = span > 0 ? (v - F[lo]) / span : 0.5;
    r.x = xs[lo] + w * (xs[lo + 1] - xs[lo]);
    return r;
}

struct EnvelopePair {
    std::vector<double> lower, upper;
    SolveStatus status = SolveStatus::max_iter;
    int iterations = 0;
};

// Monotone comparison envelopes bracketing every equilibrium: same fixed-point
// machinery, but the off-side branch is pinned at the unconditional mean and
// the active branch smooths the conditional tail mean of the iterate itself.
// Only meaningful for bounded supports (the iteration starts at the ends).
inline EnvelopePair solve_envelopes(DistPtr dist, const MarketParams& mp,
                                    const GridParams& gp = {},
                                    const SolveControls& sc = {}) {
    if (!std::isfinite(dist->support_lo()) || !std::isfinite(dist->support_hi()))
        throw std::invalid_argument("envelopes need a bounded signal support");
    Grid g = build_grid(gp, mp.sigma);
    std::size_t n = g.nodes.size();
    double mean = dist->mean();

    auto one_side = [&](bool upper_env) {
        auto step = [&](const std::vector<double>& r) {
            std::vector<double> psir(n);
            for (std::size_t i = 0; i < n; ++i)
                psir[i] = dist->psi(upper_env ? Side::upper : Side::lower, r[i]);
            Curve pc(g.nodes, psir, Extrapolation::clamp);
            std::vector<double> sm = convolve(g, pc, mp.sigma);
            Curve active(g.nodes, sm, Extrapolation::clamp);
            struct ConstFn {
                double v;
                double operator()(double) const { return v; }
            } flat{mean};
            std::vector<double> C(n);
            parallel_for(n, [&](std::size_t i) {
                double x = g.nodes[i];
                C[i] = upper_env ? convolve_split_at(active, flat, mp.sigma, x, g.hermite_nodes)
                                 : convolve_split_at(flat, active, mp.sigma, x, g.hermite_nodes);
            });
            return detail::combine_with_average(g, std::move(C), mp.n_insiders, false);
        };
        std::vector<double> start(n, upper_env ? dist->support_lo() : dist->support_hi());
        return detail::iterate(*dist, g, std::move(start), sc, step);
    };

    EquilibriumSolution up = one_side(true);
    EquilibriumSolution dn = one_side(false);
    EnvelopePair out;
    out.upper = std::move(up.F);
    out.lower = std::move(dn.F);
    out.iterations = std::max(up.iterations, dn.iterations);
    out.status = (up.status == SolveStatus::converged && dn.status == SolveStatus::converged)
                     ? SolveStatus::converged
                     : (up.status == SolveStatus::diverged || dn.status == SolveStatus::diverged
                            ? SolveStatus::diverged
                            : SolveStatus::max_iter);
    return out;
}

}  // namespace lobeq
