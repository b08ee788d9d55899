#include "scnd/special.hpp"

#include <cmath>

namespace scnd {

namespace {

// Intermediate sums run in extended precision where the platform has it, so
// the final rounding to double dominates the error.
using wide = long double;

constexpr wide kInvSqrtPi = 0.564189583547756286948079451560772586L;

// Below this point the all-positive series is used; above it the continued
// fraction for erfc converges in a few dozen terms.
constexpr double kSeriesLimit = 3.0;

// erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n x / (1*3*...*(2n+1)).
// Every term is positive, so there is no cancellation for x >= 0.
wide erf_series(wide x) {
    const wide x2 = x * x;
    wide term = x;
    wide sum = x;
    for (int n = 1; n < 500; ++n) {
        term *= 2 * x2 / (2 * n + 1);
        sum += term;
        if (term <= sum * 1e-21L) break;
    }
    return 2 * kInvSqrtPi * std::exp(-x2) * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated with the modified Lentz algorithm.
wide erfc_continued_fraction(wide x) {
    constexpr wide tiny = 1e-300L;
    wide f = x;
    wide c = x;
    wide d = 0;
    for (int n = 1; n < 500; ++n) {
        const wide a = n / wide{2};
        d = x + a * d;
        if (d == 0) d = tiny;
        c = x + a / c;
        if (c == 0) c = tiny;
        d = 1 / d;
        const wide delta = c * d;
        f *= delta;
        if (std::abs(delta - 1) < 1e-20L) break;
    }
    return std::exp(-x * x) * kInvSqrtPi / f;
}

}  // namespace

double erf(double x) {
    if (std::isnan(x)) return x;
    if (std::isinf(x)) return x > 0 ? 1.0 : -1.0;
    const wide ax = std::abs(x);
    const double r = static_cast<double>(ax < kSeriesLimit ? erf_series(ax) : 1 - erfc_continued_fraction(ax));
    return std::signbit(x) ? -r : r;
}

double erfc(double x) {
    if (std::isnan(x)) return x;
    if (x < kSeriesLimit) return static_cast<double>(1 - (x < 0 ? -erf_series(-wide{x}) : erf_series(x)));
    if (std::isinf(x)) return 0.0;
    return static_cast<double>(erfc_continued_fraction(x));
}

}  // namespace scnd
