#include "scnd/error.hpp"

#include <sstream>

namespace scnd {

NonIntegralBinary::NonIntegralBinary(std::string variable, double value)
    : Error("binary variable " + variable + " is not integral: " + std::to_string(value)),
      variable_(std::move(variable)),
      value_(value) {}

namespace {
std::string radicand_message(double r) {
    std::ostringstream os;
    os.precision(17);
    os << "pairwise-product sum is negative: " << r;
    return os.str();
}
}  // namespace

NegativeRadicand::NegativeRadicand(double radicand)
    : Error(radicand_message(radicand)), radicand_(radicand) {}

}  // namespace scnd
