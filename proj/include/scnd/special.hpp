#pragma once

namespace scnd {

/// Error function, accurate to a few ulp in absolute terms for every finite x.
/// erf(-x) == -erf(x) holds exactly.
double erf(double x);

/// Complementary error function 1 - erf(x), evaluated without cancellation
/// for large positive x.
double erfc(double x);

}  // namespace scnd
