#include <catch2/catch_amalgamated.hpp>

#include "lobeq/special.hpp"

using namespace lobeq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("normal density and cdf match reference values") {
    CHECK_THAT(normal_pdf(0.0), WithinRel(0.3989422804014327, 1e-15));
    CHECK_THAT(normal_pdf(1.0), WithinRel(0.24197072451914334, 1e-14));
    CHECK_THAT(normal_cdf(0.0), WithinAbs(0.5, 1e-16));
    CHECK_THAT(normal_cdf(1.0), WithinRel(0.8413447460685429, 1e-14));
    CHECK_THAT(normal_cdf(-1.0), WithinRel(0.15865525393145705, 1e-14));
    CHECK_THAT(normal_cdf(-10.0), WithinRel(7.619853024160525e-24, 1e-12));
}

TEST_CASE("cdf complement identity holds across the range") {
    for (double t : {-8.0, -3.0, -0.5, 0.0, 0.7, 2.0, 6.0})
        CHECK_THAT(normal_cdf(t) + normal_cdf(-t), WithinAbs(1.0, 1e-15));
}

TEST_CASE("log cdf agrees with the plain cdf where both are representable") {
    for (double t : {-30.0, -12.0, -5.0, -1.0, 0.0, 1.0, 5.0, 9.0, 20.0})
        CHECK_THAT(normal_lcdf(t), WithinAbs(std::log(normal_cdf(t)), 5e-14));
}

TEST_CASE("log cdf stays finite and ordered far past underflow") {
    double a = normal_lcdf(-40.0), b = normal_lcdf(-45.0);
    CHECK(std::isfinite(a));
    CHECK(b < a);
    // leading term is -t^2/2
    CHECK_THAT(a / (-0.5 * 1600.0), WithinRel(1.0, 0.01));
}

TEST_CASE("quantile inverts the cdf") {
    CHECK_THAT(normal_quantile(0.975), WithinRel(1.959963984540054, 1e-12));
    CHECK_THAT(normal_quantile(0.5), WithinAbs(0.0, 1e-15));
    for (double t : {-3.0, -0.4, 0.0, 1.2, 4.5})
        CHECK_THAT(normal_quantile(normal_cdf(t)), WithinAbs(t, 1e-11));
}

TEST_CASE("stable log of one minus an exponential") {
    CHECK_THAT(log1mexp(-0.1), WithinRel(-2.3521684610440907, 1e-14));
    CHECK_THAT(log1mexp(-3.0), WithinRel(-0.05106918094270159, 1e-14));
    CHECK_THAT(log1mexp(-50.0), WithinRel(-std::exp(-50.0), 1e-12));
    CHECK(log1mexp(0.0) == kNegInf);
}

TEST_CASE("guarded log maps nonpositive input to negative infinity") {
    CHECK(safe_log(0.0) == kNegInf);
    CHECK(safe_log(-2.0) == kNegInf);
    CHECK_THAT(safe_log(2.0), WithinRel(std::log(2.0), 1e-16));
}
