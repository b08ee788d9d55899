#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace scnd {

/// Locale-independent rendering with 17 significant digits; every finite
/// double round-trips exactly.
std::string format_double(double v);

/// Strict parse of a whole field; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace scnd
