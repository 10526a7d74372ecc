#pragma once
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lobeq {

enum class FitMode { loglog, logloglog };

struct FitWindow {
    double lo = 0.0, hi = 0.0;  // in x; ignored when automatic
    bool automatic = true;
};

struct FitResult {
    double slope = 0.0, intercept = 0.0, stderr_slope = 0.0;
    std::size_t n_points = 0;
    double window_lo = 0.0, window_hi = 0.0;
};

// Least-squares exponent of y against x on transformed axes.
//   loglog:     log|y| ~ slope * log(x)         (power laws)
//   logloglog:  log|y| ~ slope * log(log(x))    (logarithmic impact laws)
// The default window is the top decade of x, widened downward until at least
// 40 usable points are inside; the 5 outermost points get weight 0.2 since the
// grid tail is where truncation bias lives.
inline FitResult fit_tail_exponent(const std::vector<double>& xs,
                                   const std::vector<double>& ys, FitMode mode,
                                   FitWindow win = {}) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit: size mismatch");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double x = xs[i], y = std::abs(ys[i]);
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) continue;
        if (mode == FitMode::logloglog && x <= 1.0) continue;
        idx.push_back(i);
    }
    if (idx.size() < 3) throw std::invalid_argument("fit: not enough usable points");

    double lo = win.lo, hi = win.hi;
    if (win.automatic) {
        hi = xs[idx.back()];
        lo = hi / 10.0;
        auto count_in = [&](double l) {
            std::size_t c = 0;
            for (auto i : idx)
                if (xs[i] >= l && xs[i] <= hi) ++c;
            return c;
        };
        while (count_in(lo) < 40 && lo > xs[idx.front()]) lo *= 0.8;
    }

    std::vector<double> tx, ty;
    for (auto i : idx) {
        if (xs[i] < lo || xs[i] > hi) continue;
        double u = std::log(xs[i]);
        if (mode == FitMode::logloglog) u = std::log(u);
        tx.push_back(u);
        ty.push_back(std::log(std::abs(ys[i])));
    }
    std::size_t n = tx.size();
    if (n < 3) throw std::invalid_argument("fit: window too narrow");

    std::vector<double> w(n, 1.0);
    for (std::size_t k = n >= 5 ? n - 5 : 0; k < n; ++k) w[k] = 0.2;

    double sw = 0, sx = 0, sy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sw += w[k];
        sx += w[k] * tx[k];
        sy += w[k] * ty[k];
    }
    double mx = sx / sw, my = sy / sw, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += w[k] * (tx[k] - mx) * (tx[k] - mx);
        sxy += w[k] * (tx[k] - mx) * (ty[k] - my);
    }
    FitResult r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double sse = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double e = ty[k] - (r.intercept + r.slope * tx[k]);
        sse += w[k] * e * e;
    }
    r.stderr_slope = std::sqrt(sse / (n - 2.0) / sxx);
    r.n_points = n;
    r.window_lo = lo;
    r.window_hi = hi;
    return r;
}

}  // namespace lobeq
