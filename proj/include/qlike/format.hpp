#pragma once

#include <string>
#include <string_view>

namespace qlike {

/// Locale-independent shortest decimal that round-trips at `digits`
/// significant digits (printf "%.{digits}g" semantics). Infinities print as
/// "inf" / "-inf".
std::string format_double(double value, int digits = 15);

/// Strict locale-independent parse; throws std::invalid_argument.
double parse_double(std::string_view text);

/// Value after a round trip through `format_double(value, digits)`.
double round_to_digits(double value, int digits = 15);

}  // namespace qlike
