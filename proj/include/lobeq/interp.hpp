#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lobeq {

enum class Extrapolation { clamp, linear, asymptote };

// Fitted tail form used by Extrapolation::asymptote:
//   value = offset + sign * coeff * (log x)^(1/n)   (log laws)
//   value = offset + sign * coeff * x^rho           (power laws)
struct TailLaw {
    bool power = false;
    double coeff = 0.0;
    double rho_or_invn = 1.0;
    double offset = 0.0;
    double eval(double x) const {
        double ax = std::abs(x);
        double core = power ? std::pow(ax, rho_or_invn)
                            : std::pow(std::log(std::max(ax, 1.000001)), rho_or_invn);
        return offset + (x < 0 ? -1.0 : 1.0) * coeff * core;
    }
};

inline std::size_t bisect(const std::vector<double>& x, double v) {
    // rightmost k with x[k] <= v, clamped to [0, n-2]
    if (v <= x.front()) return 0;
    if (v >= x[x.size() - 2]) return x.size() - 2;
    return std::upper_bound(x.begin(), x.end(), v) - x.begin() - 1;
}

// Fritsch-Butland shape-preserving slopes: weighted harmonic mean of adjacent
// secants, zero across local extrema.
inline std::vector<double> monotone_slopes(const std::vector<double>& x,
                                           const std::vector<double>& y) {
    std::size_t n = x.size();
    std::vector<double> g(n);
    if (n < 2) { g.assign(n, 0.0); return g; }
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x[k + 1] - x[k];
        d[k] = (y[k + 1] - y[k]) / h[k];
    }
    g[0] = d[0];
    g[n - 1] = d[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double p = d[k] * d[k - 1];
        if (p > 0.0) {
            double a = (h[k - 1] + 2.0 * h[k]) / (3.0 * (h[k - 1] + h[k]));
            g[k] = p / (a * d[k] + (1.0 - a) * d[k - 1]);
        } else {
            g[k] = 0.0;
        }
    }
    return g;
}

// Cubic Hermite evaluation on precomputed monotone slopes.
inline double hermite_eval(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& g, double v) {
    std::size_t k = bisect(x, v);
    double h = x[k + 1] - x[k], t = (v - x[k]) / h;
    double t1 = 1.0 - t;
    double h00 = (1.0 + 2.0 * t) * t1 * t1;
    double h10 = t * t1 * t1;
    double h01 = t * t * (3.0 - 2.0 * t);
    double h11 = t * t * (t - 1.0);
    return h00 * y[k] + h * h10 * g[k] + h01 * y[k + 1] + h * h11 * g[k + 1];
}

// A sampled curve on an arbitrary sorted abscissa with declared tail behavior.
// Off-node evaluation is monotone-cubic inside the span.
class Curve {
  public:
    Curve() = default;
    Curve(std::vector<double> xs, std::vector<double> ys,
          Extrapolation lo = Extrapolation::clamp, Extrapolation hi = Extrapolation::clamp)
        : x_(std::move(xs)), y_(std::move(ys)), lo_(lo), hi_(hi) {
        if (x_.size() != y_.size() || x_.size() < 2)
            throw std::invalid_argument("curve: need matching vectors, >= 2 points");
        g_ = monotone_slopes(x_, y_);
    }

    double operator()(double v) const {
        if (v < x_.front()) return extrap(v, true);
        if (v > x_.back()) return extrap(v, false);
        return hermite_eval(x_, y_, g_, v);
    }

    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }
    double front() const { return y_.front(); }
    double back() const { return y_.back(); }

    void set_tail_law(const TailLaw& law) { law_ = law; has_law_ = true; }
    bool nondecreasing(double slack = 0.0) const {
        for (std::size_t i = 0; i + 1 < y_.size(); ++i)
            if (y_[i + 1] < y_[i] - slack) return false;
        return true;
    }

  private:
    double extrap(double v, bool below) const {
        Extrapolation mode = below ? lo_ : hi_;
        switch (mode) {
            case Extrapolation::clamp:
                return below ? y_.front() : y_.back();
            case Extrapolation::linear: {
                std::size_t n = x_.size();
                if (below) {
                    double s = (y_[1] - y_[0]) / (x_[1] - x_[0]);
                    return y_[0] + s * (v - x_[0]);
                }
                double s = (y_[n - 1] - y_[n - 2]) / (x_[n - 1] - x_[n - 2]);
                return y_[n - 1] + s * (v - x_[n - 1]);
            }
            case Extrapolation::asymptote:
                if (!has_law_) throw std::runtime_error("curve: asymptote without fitted law");
                return law_.eval(v);
        }
        return 0.0;
    }

    std::vector<double> x_, y_, g_;
    Extrapolation lo_ = Extrapolation::clamp, hi_ = Extrapolation::clamp;
    TailLaw law_;
    bool has_law_ = false;
};

}  // namespace lobeq
