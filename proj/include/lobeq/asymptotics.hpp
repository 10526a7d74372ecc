#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "lobeq/book.hpp"
#include "lobeq/equilibrium.hpp"
#include "lobeq/fit.hpp"
#include "lobeq/signals.hpp"

namespace lobeq {

enum class PredictRegime { power_law, log_law, heuristic, none };

struct AsymptoticPrediction {
    Side side = Side::upper;
    PredictRegime regime = PredictRegime::none;
    bool feasible = true;
    double exponent = 0.0;      // growth index of F (or of the gap to the bound)
    double constant = 0.0;      // leading coefficient where the theory gives one
    double vol_exponent = 0.0;  // power-law index of the total-volume tail
    double is_ratio = 1.0;      // large-order limit of shortfall over impact
    std::string note;
};

// Large-order behavior implied by the registry tail of the signal law.
//   power tails:  F (or its distance to a finite bound) behaves like
//                 x^{(s-1)/(1-s/N)} with s the boundary slope of the
//                 conditional tail mean; needs N > s on unbounded sides.
//   flat tails:   F grows like ((N/(N-1)) n/k)^{1/n} (log x)^{1/n}; the
//                 bounded mirror decays at the reciprocal rate.
//   bounded laws without a registry row keep the square-law volume heuristic.
inline AsymptoticPrediction predict(const SignalDistribution& dist, int N, Side side) {
    AsymptoticPrediction p;
    p.side = side;
    const TailSpec& ts = dist.tail_meta(side);
    double bound = side == Side::upper ? dist.support_hi() : dist.support_lo();
    bool bounded = std::isfinite(bound);

    if (dist.discrete()) {
        p.regime = PredictRegime::none;
        p.note = "atomic law: no continuous tail";
        return p;
    }

    if (ts.regime == TailRegime::power_law) {
        double s = ts.psi_slope;
        if (!bounded && N <= s) {
            p.regime = PredictRegime::none;
            p.feasible = false;
            p.note = "tail too heavy for this trader count";
            return p;
        }
        p.regime = PredictRegime::power_law;
        double denom = 1.0 - s / N;
        p.exponent = (s - 1.0) / denom;
        p.is_ratio = N / (N + p.exponent);
        p.vol_exponent = bounded ? 2.0 : s / denom;
        return p;
    }

    if (ts.regime == TailRegime::log_law) {
        double n = ts.flatness_order, k = ts.flatness_const;
        if (N == 1) {
            p.regime = PredictRegime::heuristic;
            p.exponent = bounded ? -1.0 / n : 1.0 / n;
            p.note = "single-trader case sits outside the averaged-tail law; "
                     "exponent kept, constant dropped";
            return p;
        }
        p.regime = PredictRegime::log_law;
        double body = (double(N) / (N - 1)) * n / k;
        p.exponent = bounded ? -1.0 / n : 1.0 / n;
        p.constant = std::pow(body, p.exponent);
        p.is_ratio = 1.0;
        if (bounded) p.vol_exponent = 2.0;
        return p;
    }

    if (bounded) {
        p.regime = PredictRegime::heuristic;
        p.vol_exponent = 2.0;
        p.note = "no registry tail; square-law volume heuristic only";
        return p;
    }
    p.regime = PredictRegime::none;
    p.note = "no registry tail for this side";
    return p;
}

struct ValidationEntry {
    std::string quantity;  // what was fitted
    Side side = Side::upper;
    PredictRegime regime = PredictRegime::none;
    double predicted = 0.0, fitted = 0.0, rel_error = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    bool ok = false;
};

// Fit the solved curve against the predicted tail behavior on one side.
inline std::vector<ValidationEntry> validate(const EquilibriumSolution& sol, Side side,
                                             double rel_tol = 0.15) {
    std::vector<ValidationEntry> out;
    const SignalDistribution& dist = *sol.dist;
    int N = sol.market.n_insiders;
    AsymptoticPrediction p = predict(dist, N, side);
    const Grid& g = sol.grid;
    std::size_t n = g.nodes.size();

    // orient positive-x arrays toward the requested side
    std::vector<double> xs, fs;
    xs.reserve(n);
    fs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = side == Side::upper ? g.nodes[i] : -g.nodes[n - 1 - i];
        double F = side == Side::upper ? sol.F[i] : -sol.F[n - 1 - i];
        if (x <= 0.0) continue;
        xs.push_back(x);
        fs.push_back(F);
    }
    double bound = side == Side::upper ? dist.support_hi() : dist.support_lo();
    if (side == Side::lower) bound = -bound;

    auto push = [&](const std::string& what, double predicted, const FitResult& fr) {
        ValidationEntry e;
        e.quantity = what;
        e.side = side;
        e.regime = p.regime;
        e.predicted = predicted;
        e.fitted = fr.slope;
        e.rel_error = std::abs(fr.slope - predicted) /
                      std::max(std::abs(predicted), 1e-12);
        e.window_lo = fr.window_lo;
        e.window_hi = fr.window_hi;
        e.ok = e.rel_error <= rel_tol;
        out.push_back(e);
    };

    if (p.regime == PredictRegime::power_law) {
        if (std::isfinite(bound)) {
            std::vector<double> gap(fs.size());
            for (std::size_t i = 0; i < fs.size(); ++i) gap[i] = bound - fs[i];
            push("impact gap to bound", p.exponent,
                 fit_tail_exponent(xs, gap, FitMode::loglog));
        } else {
            push("impact growth", p.exponent, fit_tail_exponent(xs, fs, FitMode::loglog));
        }
    } else if (p.regime == PredictRegime::log_law ||
               (p.regime == PredictRegime::heuristic && !std::isfinite(bound))) {
        if (std::isfinite(bound)) {
            std::vector<double> gap(fs.size());
            for (std::size_t i = 0; i < fs.size(); ++i) gap[i] = bound - fs[i];
            push("impact gap to bound", p.exponent,
                 fit_tail_exponent(xs, gap, FitMode::logloglog));
        } else {
            push("impact growth", p.exponent,
                 fit_tail_exponent(xs, fs, FitMode::logloglog));
        }
    }

    if (p.vol_exponent > 0.0) {
        VolumeTails vt = volume_tail(sol);
        std::vector<double> tot(fs.size());
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double x = side == Side::upper ? g.nodes[i] : -g.nodes[n - 1 - i];
            if (x <= 0.0) continue;
            tot[j++] = side == Side::upper ? vt.total[i] : vt.total[n - 1 - i];
        }
        // the volume tail dies fast; fit where it is still resolved
        std::vector<double> vx, vy;
        for (std::size_t i = 0; i < tot.size(); ++i)
            if (tot[i] > 1e-12) {
                vx.push_back(xs[i]);
                vy.push_back(tot[i]);
            }
        if (vx.size() >= 45) {
            FitResult fr = fit_tail_exponent(vx, vy, FitMode::loglog);
            fr.slope = -fr.slope;  // report the decay index as positive
            push("total volume tail", p.vol_exponent, fr);
        }
    }
    return out;
}

struct IsRatioCheck {
    double predicted = 1.0, measured = 1.0, rel_error = 0.0;
    bool applicable = false;
};

// Shortfall-to-impact ratio at the far end of the grid against N/(N+rho).
inline IsRatioCheck is_ratio_check(const EquilibriumSolution& sol, Side side) {
    IsRatioCheck c;
    AsymptoticPrediction p = predict(*sol.dist, sol.market.n_insiders, side);
    if (p.regime != PredictRegime::power_law) return c;
    c.applicable = true;
    c.predicted = p.is_ratio;
    double x = side == Side::upper ? sol.grid.nodes.back() : sol.grid.nodes.front();
    Curve Fc(sol.grid.nodes, sol.F, Extrapolation::clamp);
    double F = Fc(x), IS = implementation_shortfall(sol, x);
    double bound = side == Side::upper ? sol.dist->support_hi() : sol.dist->support_lo();
    c.measured = std::isfinite(bound) ? (bound - IS) / (bound - F) : IS / F;
    c.rel_error = std::abs(c.measured - c.predicted) / std::abs(c.predicted);
    return c;
}

}  // namespace lobeq
