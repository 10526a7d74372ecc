#pragma once
#include <cmath>
#include <vector>

#include "lobeq/grid.hpp"
#include "lobeq/interp.hpp"
#include "lobeq/parallel.hpp"
#include "lobeq/quadrature.hpp"
#include "lobeq/special.hpp"

namespace lobeq {

inline double gaussian_density(double sigma, double z) {
    return normal_pdf(z / sigma) / sigma;
}

// (1/x) int_0^x q(sigma, y - z) dy; the x -> 0 limit is q(sigma, z).
inline double averaged_kernel(double sigma, double x, double z) {
    if (x == 0.0) return gaussian_density(sigma, z);
    return (normal_cdf((x - z) / sigma) - normal_cdf(-z / sigma)) / x;
}

namespace detail {
constexpr double kTailT = 9.0;        // half-width of the t-integration window
constexpr double kSingleBranch = 16.0;  // |x|/sigma beyond which one branch carries all mass
constexpr double kPanelWidth = 1.5;

// integrate f(x + sqrt(2) sigma t) e^{-t^2}/sqrt(pi) over [lo, hi] with
// composite Gauss-Legendre panels; exact enough for the kinked book branches.
template <class F>
double gauss_window(const F& f, double sigma, double x, double lo, double hi) {
    if (hi <= lo) return 0.0;
    const QuadRule& gl = legendre01_rule(20);
    int np = static_cast<int>(std::ceil((hi - lo) / kPanelWidth));
    double acc = 0.0, w = (hi - lo) / np;
    for (int p = 0; p < np; ++p) {
        double a = lo + p * w;
        for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
            double t = a + w * gl.nodes[k];
            acc += w * gl.weights[k] * std::exp(-t * t) * f(x + kSqrt2 * sigma * t);
        }
    }
    return acc / std::sqrt(M_PI);
}

template <class F>
double gauss_full(const F& f, double sigma, double x, int nh) {
    const QuadRule& gh = hermite_rule(nh);
    double acc = 0.0;
    for (std::size_t k = 0; k < gh.nodes.size(); ++k)
        acc += gh.weights[k] * f(x + kSqrt2 * sigma * gh.nodes[k]);
    return acc / std::sqrt(M_PI);
}
}  // namespace detail

// Gaussian smoothing of a two-branch function (buy branch for z > 0, sell for
// z < 0) evaluated at x.  The split honors the jump at zero: away from the
// center a single smooth branch sees the whole Gaussian window, near it each
// branch is integrated on its own side of the kink.
template <class FB, class FS>
double convolve_split_at(const FB& buy, const FS& sell, double sigma, double x,
                         int hermite_n = 64) {
    if (x >= detail::kSingleBranch * sigma)
        return detail::gauss_full(buy, sigma, x, hermite_n);
    if (x <= -detail::kSingleBranch * sigma)
        return detail::gauss_full(sell, sigma, x, hermite_n);
    double t0 = -x / (kSqrt2 * sigma);
    double up = detail::gauss_window(buy, sigma, x, std::max(t0, -detail::kTailT),
                                     detail::kTailT);
    double dn = detail::gauss_window(sell, sigma, x, -detail::kTailT,
                                     std::min(t0, detail::kTailT));
    return up + dn;
}

// Smoothed two-branch book on every grid node.
inline std::vector<double> convolve(const Grid& g, const Curve& buy, const Curve& sell,
                                    double sigma) {
    std::vector<double> out(g.nodes.size());
    parallel_for(g.nodes.size(), [&](std::size_t i) {
        out[i] = convolve_split_at(buy, sell, sigma, g.nodes[i], g.hermite_nodes);
    });
    return out;
}

// Plain smoothing of one continuous curve (no kink).
inline std::vector<double> convolve(const Grid& g, const Curve& f, double sigma) {
    std::vector<double> out(g.nodes.size());
    parallel_for(g.nodes.size(), [&](std::size_t i) {
        out[i] = detail::gauss_full(f, sigma, g.nodes[i], g.hermite_nodes);
    });
    return out;
}

// avg[i] = (1/x_i) int_0^{x_i} c dy (trapezoid), with the x = 0 limit c(0).
inline std::vector<double> cumulative_average(const Grid& g, const std::vector<double>& c) {
    std::size_t n = g.nodes.size(), i0 = g.zero_index;
    std::vector<double> cum(n, 0.0), avg(n);
    for (std::size_t i = i0 + 1; i < n; ++i)
        cum[i] = cum[i - 1] + 0.5 * (c[i] + c[i - 1]) * (g.nodes[i] - g.nodes[i - 1]);
    for (std::size_t i = i0; i-- > 0;)
        cum[i] = cum[i + 1] - 0.5 * (c[i] + c[i + 1]) * (g.nodes[i + 1] - g.nodes[i]);
    for (std::size_t i = 0; i < n; ++i)
        avg[i] = (i == i0) ? c[i0] : cum[i] / g.nodes[i];
    return avg;
}

}  // namespace lobeq
