#pragma once

#include <stdexcept>
#include <string>

namespace qlike {

/// Operand shapes do not match what an operation requires.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input lies outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Inconsistent user configuration (bad flags, mismatched basis, ...).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace qlike
