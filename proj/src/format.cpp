#include "qlike/format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string_view>

namespace qlike {

std::string format_double(double value, int digits) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (std::isnan(value)) {
        return "nan";
    }
    if (value == 0.0) {
        value = 0.0;  // drop the sign of -0
    }
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, digits);
    return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text) {
    if (text == "inf") {
        return INFINITY;
    }
    if (text == "-inf") {
        return -INFINITY;
    }
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (begin != end && *begin == '+') {
        ++begin;
    }
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return value;
}

double round_to_digits(double value, int digits) { return parse_double(format_double(value, digits)); }

}  // namespace qlike
