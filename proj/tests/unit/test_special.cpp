#include <doctest.h>

#include <cmath>

#include "../oracle/erf_series.hpp"
#include "scnd/special.hpp"

TEST_CASE("erf fixed points") {
    CHECK(scnd::erf(0.0) == 0.0);
    CHECK(std::abs(scnd::erf(1.0) - 0.8427007929497149) <= 1e-16);
    CHECK(scnd::erf(-2.0) == -scnd::erf(2.0));
    CHECK(scnd::erf(INFINITY) == 1.0);
    CHECK(scnd::erf(-INFINITY) == -1.0);
    CHECK(std::isnan(scnd::erf(NAN)));
}

TEST_CASE("erf matches the 50-digit series on a dense grid") {
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const double x = -6.0 + 12.0 * n / 999.0;
        const double err = std::abs(scnd::erf(x) - oracle::erf_maclaurin(x));
        worst = std::max(worst, err);
        CHECK(scnd::erf(-x) == -scnd::erf(x));
    }
    CHECK(worst <= 1e-12);
    MESSAGE("worst absolute erf error on [-6, 6]: " << worst);
}

TEST_CASE("erf is monotone across the series/continued-fraction seam") {
    double prev = scnd::erf(2.9);
    for (double x = 2.9; x <= 3.1; x += 1e-4) {
        const double v = scnd::erf(x);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("erfc keeps relative accuracy in the tail") {
    // erfc(5) = 1.5374597944280348502e-12
    CHECK(scnd::erfc(5.0) == doctest::Approx(1.5374597944280348502e-12).epsilon(1e-14));
    CHECK(scnd::erfc(0.0) == 1.0);
    CHECK(scnd::erfc(-1.0) == doctest::Approx(2.0 - scnd::erfc(1.0)));
}
