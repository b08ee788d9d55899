#include "scnd/rng.hpp"

#include <cmath>
#include <numbers>

namespace scnd {

double Stream::normal() noexcept {
    const double u1 = uniform_open_closed();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace scnd
