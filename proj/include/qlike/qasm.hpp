#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qlike/simulator.hpp"

namespace qlike {

/// OpenQASM 2.0 text in the subset described in docs/qasm-subset.md.
/// Qubit i of the circuit is q[i]; measured_qubits[k] is stored in c[k].
std::string emit_qasm(const Circuit& circuit);

class QasmParseError : public std::runtime_error {
public:
    QasmParseError(const std::string& message, std::size_t line, std::size_t column);

    /// 1-based position of the offending token.
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

Circuit parse_qasm(std::string_view text);

}  // namespace qlike
