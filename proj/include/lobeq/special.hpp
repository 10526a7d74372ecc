#pragma once
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

namespace lobeq {

inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kInvSqrt2Pi = 0.3989422804014327;
inline constexpr double kLnSqrt2Pi = 0.9189385332046727;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

inline double normal_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / kSqrt2); }

// log of the standard normal CDF; erfc until it underflows, then a Mills-ratio
// expansion (relative error < 3e-16 for t < -36).
inline double normal_lcdf(double t) {
    if (t > -36.0) {
        double c = 0.5 * std::erfc(-t / kSqrt2);
        if (t > 8.0) return std::log1p(-0.5 * std::erfc(t / kSqrt2));
        return std::log(c);
    }
    double t2 = t * t, r = 1.0 / t2;
    double mills = 1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * 105.0)));
    return -0.5 * t2 - std::log(-t) - kLnSqrt2Pi + std::log(mills);
}

inline double normal_quantile(double p) {
    return kSqrt2 * boost::math::erf_inv(2.0 * p - 1.0);
}

inline double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

// log(1 - e^x) for x <= 0, stable near both ends.
inline double log1mexp(double x) {
    if (x >= 0.0) return kNegInf;
    if (x > -0.6931471805599453) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

}  // namespace lobeq
