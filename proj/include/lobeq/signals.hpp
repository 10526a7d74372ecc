#pragma once
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lobeq/special.hpp"

namespace lobeq {

struct Atom {
    double value, prob;
};

enum class Side { upper, lower };
enum class TailRegime { power_law, log_law, unsupported };

// Boundary shape of the conditional tail mean: psi_slope is the derivative of
// Psi at the relevant support end; (n, k) parameterize the flat-tail expansion
// used by the logarithmic impact laws.
struct TailSpec {
    Side side = Side::upper;
    double psi_slope = 1.0;
    double flatness_order = 0.0;
    double flatness_const = 1.0;
    TailRegime regime = TailRegime::unsupported;
};

class SignalDistribution {
  public:
    virtual ~SignalDistribution() = default;

    double support_lo() const { return m_; }
    double support_hi() const { return M_; }
    double mean() const { return mean_; }
    const std::string& family() const { return family_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    bool discrete() const { return !atoms_.empty(); }

    virtual double pi_plus(double y) const = 0;
    virtual double phi_plus(double y) const = 0;
    virtual double pi_minus(double y) const { return 1.0 - pi_plus(y); }
    virtual double phi_minus(double y) const { return mean_ - phi_plus(y); }
    virtual double quantile(double p) const = 0;

    // Log-space functionals; overridden wherever the plain value underflows
    // before the tail becomes irrelevant.  The partial-moment pair is taken
    // around the mean, which keeps both quantities nonnegative for any law:
    //   log_phi_plus   = log E[(V - mean) 1{V > y}]
    //   log_nphi_minus = log E[(mean - V) 1{V <= y}]
    virtual double log_pi_plus(double y) const { return safe_log(pi_plus(y)); }
    virtual double log_phi_plus(double y) const {
        return safe_log(phi_plus(y) - mean_ * pi_plus(y));
    }
    virtual double log_pi_minus(double y) const { return safe_log(pi_minus(y)); }
    virtual double log_nphi_minus(double y) const {
        return safe_log(mean_ * pi_minus(y) - phi_minus(y));
    }

    double psi(Side side, double y) const {
        if (side == Side::upper) {
            if (y >= M_) return M_;
            double den = pi_plus(y);
            if (den <= 0.0) return M_;
            double v = phi_plus(y) / den;
            return std::min(std::max(v, m_), M_);
        }
        if (y <= m_) return m_;
        double den = pi_minus(y);
        if (den <= 0.0) return m_;
        double v = phi_minus(y) / den;
        return std::min(std::max(v, m_), M_);
    }

    const TailSpec& tail_meta(Side s) const { return s == Side::upper ? tail_hi_ : tail_lo_; }

    double stdev() const {
        if (sd_ >= 0.0) return sd_;
        sd_ = compute_stdev();
        return sd_;
    }

  protected:
    virtual double compute_stdev() const {
        if (discrete()) {
            double v2 = 0.0;
            for (const auto& a : atoms_) v2 += a.prob * a.value * a.value;
            return std::sqrt(v2 - mean_ * mean_);
        }
        // E[V^2] = 2 int_0^inf y Pi+(y) dy - 2 int_{-inf}^0 y Pi-(y) dy + shift terms;
        // generic quadrature over the quantile map is simpler and accurate enough.
        double v2 = 0.0;
        const int n = 400;
        for (int i = 0; i < n; ++i) {
            double p = (i + 0.5) / n;
            double q = quantile(p);
            v2 += q * q / n;
        }
        return std::sqrt(std::max(v2 - mean_ * mean_, 0.0));
    }

    double m_ = kNegInf, M_ = kInf, mean_ = 0.0;
    mutable double sd_ = -1.0;
    std::string family_ = "unknown";
    std::vector<Atom> atoms_;
    TailSpec tail_hi_, tail_lo_;
};

using DistPtr = std::shared_ptr<const SignalDistribution>;

inline TailSpec make_tail(Side s, TailRegime r, double slope, double n = 0.0,
                          double k = 1.0) {
    TailSpec t;
    t.side = s;
    t.regime = r;
    t.psi_slope = slope;
    t.flatness_order = n;
    t.flatness_const = k;
    return t;
}

// ---------------------------------------------------------------- discrete

class DiscreteDistribution : public SignalDistribution {
  public:
    DiscreteDistribution(std::vector<double> vals, std::vector<double> probs,
                         std::string name) {
        family_ = std::move(name);
        double mu = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            atoms_.push_back({vals[i], probs[i]});
            mu += vals[i] * probs[i];
        }
        mean_ = mu;
        m_ = vals.front();
        M_ = vals.back();
        tail_hi_ = make_tail(Side::upper, TailRegime::unsupported, 1.0);
        tail_lo_ = make_tail(Side::lower, TailRegime::unsupported, 1.0);
    }
    double pi_plus(double y) const override {
        double s = 0.0;
        for (const auto& a : atoms_)
            if (a.value > y) s += a.prob;
        return s;
    }
    double phi_plus(double y) const override {
        double s = 0.0;
        for (const auto& a : atoms_)
            if (a.value > y) s += a.value * a.prob;
        return s;
    }
    double quantile(double p) const override {
        double acc = 0.0;
        for (const auto& a : atoms_) {
            acc += a.prob;
            if (p <= acc) return a.value;
        }
        return atoms_.back().value;
    }
};

// ---------------------------------------------------------------- gaussian

class GaussianSignal : public SignalDistribution {
  public:
    explicit GaussianSignal(double Sigma) : s_(std::sqrt(Sigma)) {
        family_ = "gaussian";
        tail_hi_ = make_tail(Side::upper, TailRegime::log_law, 1.0, 2, 1.0 / Sigma);
        tail_lo_ = make_tail(Side::lower, TailRegime::log_law, 1.0, 2, 1.0 / Sigma);
    }
    double pi_plus(double y) const override { return normal_cdf(-y / s_); }
    double pi_minus(double y) const override { return normal_cdf(y / s_); }
    double phi_plus(double y) const override { return s_ * normal_pdf(y / s_); }
    double phi_minus(double y) const override { return -phi_plus(y); }
    double quantile(double p) const override { return s_ * normal_quantile(p); }
    double log_pi_plus(double y) const override { return normal_lcdf(-y / s_); }
    double log_pi_minus(double y) const override { return normal_lcdf(y / s_); }
    double log_phi_plus(double y) const override {
        return std::log(s_) - 0.5 * (y / s_) * (y / s_) - kLnSqrt2Pi;
    }
    double log_nphi_minus(double y) const override { return log_phi_plus(y); }

  protected:
    double compute_stdev() const override { return s_; }
    double s_;
};

// ------------------------------------------------------ truncated gaussian

class TruncatedGaussianSignal : public SignalDistribution {
  public:
    TruncatedGaussianSignal(double Sigma, double M) : s_(std::sqrt(Sigma)) {
        family_ = "truncated_gaussian";
        M_ = M;
        m_ = -M;
        Z_ = std::erf(M / (s_ * kSqrt2));
        plo_ = normal_cdf(-M / s_);
        tail_hi_ = make_tail(Side::upper, TailRegime::power_law, 0.5);
        tail_lo_ = make_tail(Side::lower, TailRegime::power_law, 0.5);
    }
    double pi_plus(double y) const override {
        double yc = std::min(std::max(y, -M_), M_);
        return (normal_cdf(M_ / s_) - normal_cdf(yc / s_)) / Z_;
    }
    double phi_plus(double y) const override {
        double yc = std::min(std::max(y, -M_), M_);
        return s_ * (normal_pdf(yc / s_) - normal_pdf(M_ / s_)) / Z_;
    }
    double phi_minus(double y) const override { return -phi_plus(y); }
    double quantile(double p) const override {
        return s_ * normal_quantile(plo_ + p * Z_);
    }

  private:
    double s_, Z_, plo_;
};

// --------------------------------------------------------------- lognormal
// V = exp(sqrt(S) G - S/2) - 1 with G standard normal: E[V] = 0, support (-1, inf).

class LogNormalSignal : public SignalDistribution {
  public:
    explicit LogNormalSignal(double Sigma) : S_(Sigma), sq_(std::sqrt(Sigma)) {
        family_ = "lognormal";
        m_ = -1.0;
        vmed_ = std::exp(-S_ / 2) - 1.0;
        tail_hi_ = make_tail(Side::upper, TailRegime::unsupported, 1.0);
        tail_lo_ = make_tail(Side::lower, TailRegime::unsupported, 1.0);
    }
    double pi_plus(double y) const override {
        if (y <= -1.0) return 1.0;
        return normal_cdf(-(std::log1p(y) + S_ / 2) / sq_);
    }
    double pi_minus(double y) const override {
        if (y <= -1.0) return 0.0;
        return normal_cdf((std::log1p(y) + S_ / 2) / sq_);
    }
    double phi_plus(double y) const override {
        if (y <= -1.0) return 0.0;
        double la = std::log1p(y);
        double a1 = (la - S_ / 2) / sq_, a2 = (la + S_ / 2) / sq_;
        if (la >= std::log1p(vmed_))
            return normal_cdf(-a1) - normal_cdf(-a2);  // survival side: no cancellation
        return -(normal_cdf(a1) - normal_cdf(a2));
    }
    double quantile(double p) const override {
        return std::exp(sq_ * normal_quantile(p) - S_ / 2) - 1.0;
    }
    double log_pi_plus(double y) const override {
        if (y <= -1.0) return 0.0;
        return normal_lcdf(-(std::log1p(y) + S_ / 2) / sq_);
    }
    double log_pi_minus(double y) const override {
        if (y <= -1.0) return kNegInf;
        return normal_lcdf((std::log1p(y) + S_ / 2) / sq_);
    }
    double log_phi_plus(double y) const override {
        if (y <= -1.0) return kNegInf;
        double la = std::log1p(y);
        double a1 = (la - S_ / 2) / sq_, a2 = (la + S_ / 2) / sq_;
        if (la >= std::log1p(vmed_)) {
            double lb = normal_lcdf(-a1), lsm = normal_lcdf(-a2);
            return lb + log1mexp(std::min(lsm - lb, -1e-17));
        }
        double lb = normal_lcdf(a2), lsm = normal_lcdf(a1);
        return lb + log1mexp(std::min(lsm - lb, -1e-17));
    }
    double log_nphi_minus(double y) const override { return log_phi_plus(y); }

  protected:
    double compute_stdev() const override { return std::sqrt(std::expm1(S_)); }

  private:
    double S_, sq_, vmed_;
};

// ------------------------------------------------------------- exponential
// V = X - 1/lambda with X ~ Exp(lambda): E[V] = 0, support (-1/lambda, inf).

class ExponentialSignal : public SignalDistribution {
  public:
    explicit ExponentialSignal(double lam) : lam_(lam) {
        family_ = "exponential";
        m_ = -1.0 / lam;
        tail_hi_ = make_tail(Side::upper, TailRegime::log_law, 1.0, 1, lam);
        tail_lo_ = make_tail(Side::lower, TailRegime::power_law, 0.5);
    }
    double pi_plus(double y) const override {
        double a = lam_ * y + 1.0;
        return a > 0.0 ? std::exp(-a) : 1.0;
    }
    double pi_minus(double y) const override {
        double a = lam_ * y + 1.0;
        return a > 0.0 ? -std::expm1(-a) : 0.0;
    }
    double phi_plus(double y) const override {
        double a = lam_ * y + 1.0;
        return a > 0.0 ? (y + 1.0 / lam_) * std::exp(-a) : 0.0;
    }
    double quantile(double p) const override {
        return -std::log1p(-p) / lam_ - 1.0 / lam_;
    }
    double log_pi_plus(double y) const override {
        double a = lam_ * y + 1.0;
        return a > 0.0 ? -a : 0.0;
    }
    double log_pi_minus(double y) const override {
        double a = lam_ * y + 1.0;
        return a > 0.0 ? log1mexp(-a) : kNegInf;
    }
    double log_phi_plus(double y) const override {
        double a = lam_ * y + 1.0;
        return a > 0.0 ? safe_log(y + 1.0 / lam_) - a : kNegInf;
    }
    double log_nphi_minus(double y) const override { return log_phi_plus(y); }

  protected:
    double compute_stdev() const override { return 1.0 / lam_; }

  private:
    double lam_;
};

// ------------------------------------------------------------------ student

class StudentSignal : public SignalDistribution {
  public:
    StudentSignal(double alpha, double scale) : nu_(alpha), s_(scale), dist_(alpha) {
        if (alpha <= 1.0) throw std::invalid_argument("student: tail index must exceed 1");
        family_ = "student";
        c_ = std::exp(std::lgamma((nu_ + 1) / 2) - std::lgamma(nu_ / 2)) /
             std::sqrt(nu_ * M_PI);
        double slope = nu_ / (nu_ - 1.0);
        tail_hi_ = make_tail(Side::upper, TailRegime::power_law, slope);
        tail_lo_ = make_tail(Side::lower, TailRegime::power_law, slope);
    }
    double pi_plus(double y) const override {
        return boost::math::cdf(boost::math::complement(dist_, y / s_));
    }
    double pi_minus(double y) const override { return boost::math::cdf(dist_, y / s_); }
    double phi_plus(double y) const override {
        double t = y / s_;
        return s_ * c_ * nu_ / (nu_ - 1.0) *
               std::pow(1.0 + t * t / nu_, -(nu_ - 1.0) / 2.0);
    }
    double phi_minus(double y) const override { return -phi_plus(y); }
    double quantile(double p) const override { return s_ * boost::math::quantile(dist_, p); }
    double log_pi_plus(double y) const override { return safe_log(pi_plus(y)); }
    double log_pi_minus(double y) const override { return safe_log(pi_minus(y)); }
    double log_phi_plus(double y) const override {
        double t = y / s_;
        return std::log(s_ * c_ * nu_ / (nu_ - 1.0)) -
               (nu_ - 1.0) / 2.0 * std::log1p(t * t / nu_);
    }
    double log_nphi_minus(double y) const override { return log_phi_plus(y); }

  protected:
    double compute_stdev() const override {
        return nu_ > 2.0 ? s_ * std::sqrt(nu_ / (nu_ - 2.0)) : kInf;
    }

  private:
    double nu_, s_, c_;
    boost::math::students_t_distribution<double> dist_;
};

// ------------------------------------------------------------ logit-normal
// V = tanh(G/2), G ~ N(0, Sigma): support (-1, 1), symmetric.
// Theta(y) = E[(1-V)1{V>y}] has an exact alternating Gaussian-tail series in
// generator space (1 - tanh(q/2) = 2 sum (-1)^{j+1} e^{-jq}); below the series
// split point a one-time cumulative Gauss-Kronrod table covers the rest.

class LogitNormalSignal : public SignalDistribution {
  public:
    explicit LogitNormalSignal(double Sigma) : S_(Sigma), sq_(std::sqrt(Sigma)) {
        family_ = "logit_normal";
        m_ = -1.0;
        M_ = 1.0;
        tail_hi_ = make_tail(Side::upper, TailRegime::unsupported, 1.0);
        tail_lo_ = make_tail(Side::lower, TailRegime::unsupported, 1.0);
        build_table();
    }
    double pi_plus(double y) const override {
        if (y <= -1.0) return 1.0;
        if (y >= 1.0) return 0.0;
        return normal_cdf(-gen(y) / sq_);
    }
    double pi_minus(double y) const override { return pi_plus(-y); }
    double phi_plus(double y) const override {
        if (y >= 1.0) return 0.0;
        if (y <= -1.0) return 0.0;
        double ay = std::abs(y);
        return pi_plus(ay) - theta(gen(ay));
    }
    double quantile(double p) const override { return std::tanh(sq_ * normal_quantile(p) / 2); }
    double log_pi_plus(double y) const override {
        if (y <= -1.0) return 0.0;
        if (y >= 1.0) return kNegInf;
        return normal_lcdf(-gen(y) / sq_);
    }
    double log_pi_minus(double y) const override { return log_pi_plus(-y); }
    double log_phi_plus(double y) const override { return safe_log(phi_plus(y)); }
    double log_nphi_minus(double y) const override { return log_phi_plus(y); }

    double theta(double g) const {
        if (g >= kSeriesCut) {
            double acc = 0.0;
            for (int j = 1; j <= 60; ++j) {
                double term = 2.0 * std::exp(0.5 * j * j * S_ +
                                             normal_lcdf(-(g + j * S_) / sq_));
                acc += (j % 2 == 1) ? term : -term;
            }
            return std::max(acc, 0.0);
        }
        if (g <= tg_.front()) return tv_.front();
        std::size_t k = bisect_table(g);
        double w = (g - tg_[k]) / (tg_[k + 1] - tg_[k]);
        return tv_[k] * (1.0 - w) + tv_[k + 1] * w;
    }

  private:
    static constexpr double kSeriesCut = 2.0;

    double gen(double v) const {
        double vc = std::min(std::max(v, -1.0 + 1e-16), 1.0 - 1e-16);
        return 2.0 * std::atanh(vc);
    }
    std::size_t bisect_table(double g) const {
        std::size_t lo = 0, hi = tg_.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (tg_[mid] <= g ? lo : hi) = mid;
        }
        return lo;
    }
    void build_table() {
        using boost::math::quadrature::gauss_kronrod;
        auto f = [this](double q) {
            return (1.0 - std::tanh(q / 2)) * normal_pdf(q / sq_) / sq_;
        };
        double lo = -45.0 * sq_ - 1.0;
        int n = 4000;
        tg_.resize(n);
        tv_.resize(n);
        for (int i = 0; i < n; ++i)
            tg_[i] = lo + (kSeriesCut - lo) * i / (n - 1);
        double acc = theta(kSeriesCut);  // series value at the cut
        tv_[n - 1] = acc;
        for (int i = n - 2; i >= 0; --i) {
            acc += gauss_kronrod<double, 61>::integrate(f, tg_[i], tg_[i + 1], 0, 1e-12);
            tv_[i] = acc;
        }
    }

    double S_, sq_;
    std::vector<double> tg_, tv_;
};

// ------------------------------------------------- unbounded power families
// Closed-form catalog rows; centered so E[V] = 0.

class ParetoSignal : public SignalDistribution {
  public:
    explicit ParetoSignal(double alpha) : a_(alpha) {
        if (alpha <= 1.0) throw std::invalid_argument("pareto: infinite mean");
        family_ = "pareto";
        mu0_ = a_ / (a_ - 1.0);
        m_ = 1.0 - mu0_;
        tail_hi_ = make_tail(Side::upper, TailRegime::power_law, a_ / (a_ - 1.0));
        tail_lo_ = make_tail(Side::lower, TailRegime::power_law, 0.5);
    }
    double pi_plus(double y) const override {
        double x = y + mu0_;
        return x <= 1.0 ? 1.0 : std::pow(x, -a_);
    }
    double phi_plus(double y) const override {
        double x = std::max(y + mu0_, 1.0);
        return mu0_ * std::pow(x, -(a_ - 1.0)) - mu0_ * pi_plus(y);
    }
    double quantile(double p) const override { return std::pow(1.0 - p, -1.0 / a_) - mu0_; }

  private:
    double a_, mu0_;
};

class LomaxSignal : public SignalDistribution {
  public:
    LomaxSignal(double alpha, double lam) : a_(alpha), l_(lam) {
        if (alpha <= 1.0) throw std::invalid_argument("lomax: infinite mean");
        family_ = "lomax";
        mu0_ = l_ / (a_ - 1.0);
        m_ = -mu0_;
        tail_hi_ = make_tail(Side::upper, TailRegime::power_law, a_ / (a_ - 1.0));
        tail_lo_ = make_tail(Side::lower, TailRegime::power_law, 0.5);
    }
    double pi_plus(double y) const override {
        double x = std::max(y + mu0_, 0.0);
        return std::pow(1.0 + x / l_, -a_);
    }
    double phi_plus(double y) const override {
        double x = std::max(y + mu0_, 0.0);
        // E[X 1{X>x}] - mu0 Pi+, with E[X|X>x] = x + (lambda + x)/(alpha - 1)
        return pi_plus(y) * (x + (l_ + x) / (a_ - 1.0) - mu0_);
    }
    double quantile(double p) const override {
        return l_ * (std::pow(1.0 - p, -1.0 / a_) - 1.0) - mu0_;
    }

  private:
    double a_, l_, mu0_;
};

class BetaPrimeSignal : public SignalDistribution {
  public:
    BetaPrimeSignal(double lam, double alpha) : l_(lam), a_(alpha) {
        if (alpha <= 1.0) throw std::invalid_argument("beta_prime: infinite mean");
        family_ = "beta_prime";
        mu0_ = l_ / (a_ - 1.0);
        m_ = -mu0_;
        tail_hi_ = make_tail(Side::upper, TailRegime::power_law, a_ / (a_ - 1.0));
        tail_lo_ = make_tail(Side::lower, TailRegime::power_law, l_ / (l_ + 1.0));
    }
    double pi_plus(double y) const override {
        double x = std::max(y + mu0_, 0.0);
        return boost::math::ibeta(a_, l_, 1.0 / (1.0 + x));
    }
    double phi_plus(double y) const override {
        double x = std::max(y + mu0_, 0.0);
        return mu0_ * boost::math::ibeta(a_ - 1.0, l_ + 1.0, 1.0 / (1.0 + x)) -
               mu0_ * pi_plus(y);
    }
    double quantile(double p) const override {
        double u = boost::math::ibeta_inv(a_, l_, 1.0 - p);
        return 1.0 / u - 1.0 - mu0_;
    }

  private:
    double l_, a_, mu0_;
};

class FrechetSignal : public SignalDistribution {
  public:
    FrechetSignal(double alpha, double scale, double loc) : a_(alpha), s_(scale), b_(loc) {
        if (alpha <= 1.0) throw std::invalid_argument("frechet: infinite mean");
        family_ = "frechet";
        mu0_ = b_ + s_ * std::tgamma(1.0 - 1.0 / a_);
        m_ = b_ - mu0_;
        tail_hi_ = make_tail(Side::upper, TailRegime::power_law, a_ / (a_ - 1.0));
        tail_lo_ = make_tail(Side::lower, TailRegime::unsupported, 1.0);
    }
    double pi_plus(double y) const override {
        double x = y + mu0_ - b_;
        if (x <= 0.0) return 1.0;
        return -std::expm1(-std::pow(x / s_, -a_));
    }
    double phi_plus(double y) const override {
        double x = y + mu0_ - b_;
        if (x <= 0.0) return 0.0;
        double u0 = std::pow(x / s_, -a_);
        // E[(X-b) 1{X>y}] = s * lower_inc_gamma(1 - 1/alpha, u0)
        double part = s_ * boost::math::tgamma_lower(1.0 - 1.0 / a_, u0);
        return part + (b_ - mu0_) * pi_plus(y);
    }
    double quantile(double p) const override {
        return b_ + s_ * std::pow(-std::log(p), -1.0 / a_) - mu0_;
    }

  private:
    double a_, s_, b_, mu0_;
};

// Generalized-gamma form x^{d-1} exp(-(lambda x)^p); d = p gives the Weibull law.
class WeibullSignal : public SignalDistribution {
  public:
    WeibullSignal(double lam, double p, double d) : l_(lam), p_(p), d_(d) {
        family_ = "weibull";
        mu0_ = std::exp(std::lgamma((d_ + 1.0) / p_) - std::lgamma(d_ / p_)) / l_;
        m_ = -mu0_;
        tail_hi_ = make_tail(Side::upper, TailRegime::log_law, 1.0, p_,
                             p_ * std::pow(l_, p_));
        tail_lo_ = make_tail(Side::lower, TailRegime::power_law, d_ / (d_ + 1.0));
    }
    double pi_plus(double y) const override {
        double x = std::max(y + mu0_, 0.0);
        return boost::math::gamma_q(d_ / p_, std::pow(l_ * x, p_));
    }
    double phi_plus(double y) const override {
        double x = std::max(y + mu0_, 0.0);
        return mu0_ * boost::math::gamma_q((d_ + 1.0) / p_, std::pow(l_ * x, p_)) -
               mu0_ * pi_plus(y);
    }
    double quantile(double p) const override {
        double u = boost::math::gamma_q_inv(d_ / p_, 1.0 - p);
        return std::pow(u, 1.0 / p_) / l_ - mu0_;
    }
    double log_pi_plus(double y) const override {
        double x = std::max(y + mu0_, 0.0);
        double u = std::pow(l_ * x, p_);
        if (u < 700.0) return safe_log(pi_plus(y));
        // Q(s, u) ~ u^{s-1} e^{-u} / Gamma(s) for u >> s
        double s = d_ / p_;
        return (s - 1.0) * std::log(u) - u - std::lgamma(s);
    }

  private:
    double l_, p_, d_, mu0_;
};

// ---------------------------------------------- quadrature-backed families
// Inverse Gaussian and normal-inverse-Gaussian: registry rows whose
// functionals come from adaptive Gauss-Kronrod on the (unnormalized) density.

class QuadratureSignal : public SignalDistribution {
  public:
    double pi_plus(double y) const override {
        if (y <= lo_) return 1.0;
        if (y >= hi_) return 0.0;
        return integrate([this](double x) { return density(x); }, y, hi_) / Z_;
    }
    double phi_plus(double y) const override {
        if (y >= hi_) return 0.0;
        double a = std::max(y, lo_);
        return integrate([this](double x) { return x * density(x); }, a, hi_) / Z_;
    }
    double quantile(double p) const override {
        double c = std::min(std::max(p, qcdf_.front()), qcdf_.back());
        std::size_t lo = 0, hi = qcdf_.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (qcdf_[mid] <= c ? lo : hi) = mid;
        }
        double w = (c - qcdf_[lo]) / std::max(qcdf_[lo + 1] - qcdf_[lo], 1e-300);
        return qx_[lo] + w * (qx_[lo + 1] - qx_[lo]);
    }

  protected:
    virtual double density(double x) const = 0;  // shifted argument, unnormalized

    void finalize() {
        Z_ = integrate([this](double x) { return density(x); }, lo_, hi_);
        double raw_mean = integrate([this](double x) { return x * density(x); }, lo_, hi_) / Z_;
        shift_ += raw_mean;  // recenter: stored density already takes shift_ into account
        lo_ -= raw_mean;
        hi_ -= raw_mean;
        m_ = lo_;
        M_ = hi_;
        mean_ = 0.0;
        build_quantile_table();
    }

    // cumulative CDF table between the 1e-10 quantiles; quantile() interpolates it
    void build_quantile_table() {
        double a = std::isfinite(lo_) ? lo_ : locate_tail(-1.0);
        double b = std::isfinite(hi_) ? hi_ : locate_tail(+1.0);
        const int n = 1500;
        qx_.resize(n);
        qcdf_.resize(n);
        for (int i = 0; i < n; ++i) qx_[i] = a + (b - a) * i / (n - 1.0);
        qcdf_[0] = std::isfinite(lo_) ? 0.0 : 1e-10;
        for (int i = 1; i < n; ++i)
            qcdf_[i] = qcdf_[i - 1] +
                       integrate([this](double x) { return density(x); }, qx_[i - 1], qx_[i]) / Z_;
        for (int i = 1; i < n; ++i)  // enforce monotonicity against rounding
            qcdf_[i] = std::max(qcdf_[i], qcdf_[i - 1] + 1e-16);
    }

    double locate_tail(double dir) const {
        double x = dir;
        while (true) {
            double mass = dir > 0
                              ? integrate([this](double t) { return density(t); }, x, hi_) / Z_
                              : integrate([this](double t) { return density(t); }, lo_, x) / Z_;
            if (mass < 1e-10 || std::abs(x) > 1e6) return x;
            x *= 2.0;
        }
    }

    template <class F>
    static double integrate(const F& f, double a, double b) {
        using boost::math::quadrature::gauss_kronrod;
        return gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-10);
    }

    double lo_ = kNegInf, hi_ = kInf;   // support in shifted coordinates
    double shift_ = 0.0;                // x_raw = x + shift_
    double Z_ = 1.0;
    std::vector<double> qx_, qcdf_;
};

class InverseGaussianSignal : public QuadratureSignal {
  public:
    InverseGaussianSignal(double mu, double lam) : mu_(mu), l_(lam) {
        family_ = "inverse_gaussian";
        lo_ = 0.0;
        finalize();
        tail_hi_ = make_tail(Side::upper, TailRegime::log_law, 1.0, 1, l_ / (2.0 * mu_ * mu_));
        tail_lo_ = make_tail(Side::lower, TailRegime::unsupported, 1.0);
    }

  protected:
    double density(double x) const override {
        double xr = x + shift_;
        if (xr <= 0.0) return 0.0;
        return std::pow(xr, -1.5) * std::exp(-l_ * (xr - mu_) * (xr - mu_) / (2 * mu_ * mu_ * xr));
    }

  private:
    double mu_, l_;
};

class NormalInverseGaussianSignal : public QuadratureSignal {
  public:
    NormalInverseGaussianSignal(double lam, double beta, double delta, double mu)
        : l_(lam), b_(beta), d_(delta), mu_(mu) {
        if (std::abs(beta) >= lam)
            throw std::invalid_argument("normal_inverse_gaussian: need |beta| < lambda");
        family_ = "normal_inverse_gaussian";
        finalize();
        tail_hi_ = make_tail(Side::upper, TailRegime::log_law, 1.0, 1, l_ + b_ - 1.0);
        tail_lo_ = make_tail(Side::lower, TailRegime::unsupported, 1.0);
    }

  protected:
    double density(double x) const override {
        double xr = x + shift_;
        if (!std::isfinite(xr)) return 0.0;
        double z = std::sqrt(d_ * d_ + (xr - mu_) * (xr - mu_));
        double u = l_ * z;
        if (u > 500.0) {  // K1 underflows before exp(beta x) overflows; go through logs
            double lk = 0.5 * std::log(M_PI / (2 * u)) - u + std::log1p(3.0 / (8 * u));
            return std::exp(lk - std::log(z) + b_ * (xr - mu_));
        }
        return boost::math::cyl_bessel_k(1, u) / z * std::exp(b_ * (xr - mu_));
    }

  private:
    double l_, b_, d_, mu_;
};

// ------------------------------------------------------- shift/scale wraps

class ScaledSignal : public SignalDistribution {
  public:
    ScaledSignal(DistPtr base, double t) : base_(std::move(base)), t_(t) {
        if (t <= 0.0) throw std::invalid_argument("scale must be positive");
        family_ = base_->family();
        m_ = t * base_->support_lo();
        M_ = t * base_->support_hi();
        mean_ = t * base_->mean();
        for (const auto& a : base_->atoms()) atoms_.push_back({t * a.value, a.prob});
        tail_hi_ = base_->tail_meta(Side::upper);
        tail_lo_ = base_->tail_meta(Side::lower);
        // scaling x -> tx maps the flatness constant k -> k / t^n on log-law sides
        auto rescale = [t](TailSpec& ts) {
            if (ts.regime == TailRegime::log_law)
                ts.flatness_const /= std::pow(t, ts.flatness_order);
        };
        rescale(tail_hi_);
        rescale(tail_lo_);
    }
    double pi_plus(double y) const override { return base_->pi_plus(y / t_); }
    double pi_minus(double y) const override { return base_->pi_minus(y / t_); }
    double phi_plus(double y) const override { return t_ * base_->phi_plus(y / t_); }
    double phi_minus(double y) const override { return t_ * base_->phi_minus(y / t_); }
    double quantile(double p) const override { return t_ * base_->quantile(p); }
    double log_pi_plus(double y) const override { return base_->log_pi_plus(y / t_); }
    double log_pi_minus(double y) const override { return base_->log_pi_minus(y / t_); }
    double log_phi_plus(double y) const override {
        return std::log(t_) + base_->log_phi_plus(y / t_);
    }
    double log_nphi_minus(double y) const override {
        return std::log(t_) + base_->log_nphi_minus(y / t_);
    }

  protected:
    double compute_stdev() const override { return t_ * base_->stdev(); }

  private:
    DistPtr base_;
    double t_;
};

class ShiftedSignal : public SignalDistribution {
  public:
    ShiftedSignal(DistPtr base, double c) : base_(std::move(base)), c_(c) {
        family_ = base_->family();
        m_ = base_->support_lo() + c;
        M_ = base_->support_hi() + c;
        mean_ = base_->mean() + c;
        for (const auto& a : base_->atoms()) atoms_.push_back({a.value + c, a.prob});
        tail_hi_ = base_->tail_meta(Side::upper);
        tail_lo_ = base_->tail_meta(Side::lower);
    }
    double pi_plus(double y) const override { return base_->pi_plus(y - c_); }
    double pi_minus(double y) const override { return base_->pi_minus(y - c_); }
    double phi_plus(double y) const override {
        return base_->phi_plus(y - c_) + c_ * base_->pi_plus(y - c_);
    }
    double phi_minus(double y) const override {
        return base_->phi_minus(y - c_) + c_ * base_->pi_minus(y - c_);
    }
    double quantile(double p) const override { return base_->quantile(p) + c_; }
    // centered partial moments are shift-invariant
    double log_pi_plus(double y) const override { return base_->log_pi_plus(y - c_); }
    double log_pi_minus(double y) const override { return base_->log_pi_minus(y - c_); }
    double log_phi_plus(double y) const override { return base_->log_phi_plus(y - c_); }
    double log_nphi_minus(double y) const override { return base_->log_nphi_minus(y - c_); }

  protected:
    double compute_stdev() const override { return base_->stdev(); }

  private:
    DistPtr base_;
    double c_;
};

// ----------------------------------------------------------------- factory

inline double param_or(const std::map<std::string, double>& p, const std::string& key,
                       double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

inline DistPtr make_distribution(const std::string& family,
                                 const std::map<std::string, double>& params = {},
                                 double shift = 0.0) {
    DistPtr d;
    if (family == "bernoulli") {
        d = std::make_shared<DiscreteDistribution>(std::vector<double>{-1.0, 1.0},
                                                   std::vector<double>{0.5, 0.5}, family);
    } else if (family == "trinomial") {
        d = std::make_shared<DiscreteDistribution>(
            std::vector<double>{-1.0, 0.0, 1.0},
            std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, family);
    } else if (family == "gaussian") {
        d = std::make_shared<GaussianSignal>(param_or(params, "Sigma", 1.0));
    } else if (family == "truncated_gaussian") {
        d = std::make_shared<TruncatedGaussianSignal>(param_or(params, "Sigma", 1.0),
                                                      param_or(params, "M", 2.0));
    } else if (family == "lognormal") {
        d = std::make_shared<LogNormalSignal>(param_or(params, "Sigma", 1.0));
    } else if (family == "logit_normal") {
        d = std::make_shared<LogitNormalSignal>(param_or(params, "Sigma", 1.0));
    } else if (family == "exponential") {
        d = std::make_shared<ExponentialSignal>(param_or(params, "lambda", 1.0));
    } else if (family == "student") {
        d = std::make_shared<StudentSignal>(param_or(params, "alpha", 3.0),
                                            param_or(params, "s", 1.0));
    } else if (family == "pareto") {
        d = std::make_shared<ParetoSignal>(param_or(params, "alpha", 3.0));
    } else if (family == "lomax") {
        d = std::make_shared<LomaxSignal>(param_or(params, "alpha", 3.0),
                                          param_or(params, "lambda", 1.0));
    } else if (family == "beta_prime") {
        d = std::make_shared<BetaPrimeSignal>(param_or(params, "lambda", 2.0),
                                              param_or(params, "alpha", 3.0));
    } else if (family == "frechet") {
        d = std::make_shared<FrechetSignal>(param_or(params, "alpha", 3.0),
                                            param_or(params, "s", 1.0),
                                            param_or(params, "beta", 0.0));
    } else if (family == "weibull") {
        double p = param_or(params, "p", 2.0);
        d = std::make_shared<WeibullSignal>(param_or(params, "lambda", 1.0), p,
                                            param_or(params, "d", p));
    } else if (family == "inverse_gaussian") {
        d = std::make_shared<InverseGaussianSignal>(param_or(params, "mu", 1.0),
                                                    param_or(params, "lambda", 1.0));
    } else if (family == "normal_inverse_gaussian") {
        d = std::make_shared<NormalInverseGaussianSignal>(
            param_or(params, "lambda", 2.0), param_or(params, "beta", 0.5),
            param_or(params, "delta", 1.0), param_or(params, "mu", 0.0));
    } else {
        throw std::invalid_argument("unknown signal family: " + family);
    }
    double scale = param_or(params, "scale", 1.0);
    if (scale != 1.0) d = std::make_shared<ScaledSignal>(d, scale);
    if (shift != 0.0) d = std::make_shared<ShiftedSignal>(d, shift);
    return d;
}

inline TailSpec tail_spec(const SignalDistribution& dist, Side side) {
    return dist.tail_meta(side);
}

}  // namespace lobeq
