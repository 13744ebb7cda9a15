#include "qlike/qasm.hpp"

#include <cctype>
#include <cmath>
#include <optional>
#include <vector>

#include "qlike/format.hpp"

namespace qlike {

namespace {

constexpr std::string_view kHeader = "OPENQASM 2.0;";
constexpr std::string_view kInclude = "include \"qelib1.inc\";";

/// Cursor over one source line.
class LineReader {
public:
    LineReader(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw QasmParseError(what, line_, pos_ + 1);
    }

    void skip_spaces() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
            ++pos_;
        }
    }

    bool at_end() {
        skip_spaces();
        return pos_ == text_.size();
    }

    void expect(std::string_view token) {
        skip_spaces();
        if (text_.substr(pos_, token.size()) != token) {
            fail("expected '" + std::string(token) + "'");
        }
        pos_ += token.size();
    }

    std::string identifier() {
        skip_spaces();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected identifier");
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    std::size_t index() {
        skip_spaces();
        const std::size_t start = pos_;
        std::size_t value = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            value = value * 10 + static_cast<std::size_t>(text_[pos_] - '0');
            if (value > 1'000'000) {
                fail("index too large");
            }
            ++pos_;
        }
        if (start == pos_) {
            fail("expected integer");
        }
        return value;
    }

    double real() {
        skip_spaces();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                       text_[pos_] == '-' || text_[pos_] == '+')) {
            ++pos_;
        }
        const std::string_view token = text_.substr(start, pos_ - start);
        try {
            const double v = parse_double(token);
            if (!std::isfinite(v)) {
                throw std::invalid_argument("non-finite");
            }
            return v;
        } catch (const std::invalid_argument&) {
            pos_ = start;
            fail("expected real number");
        }
    }

    /// `name[index]` where `name` must match `reg`.
    std::size_t reference(const std::string& reg, std::size_t size) {
        skip_spaces();
        const std::size_t start = pos_;
        const std::string name = identifier();
        if (name != reg) {
            pos_ = start;
            fail("unknown register '" + name + "'");
        }
        expect("[");
        const std::size_t at = pos_;
        const std::size_t i = index();
        if (i >= size) {
            pos_ = at;
            fail("index " + std::to_string(i) + " out of range for " + reg);
        }
        expect("]");
        return i;
    }

    std::size_t position() const { return pos_; }
    void rewind(std::size_t pos) { pos_ = pos; }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

}  // namespace

QasmParseError::QasmParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("qasm:" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

std::string emit_qasm(const Circuit& circuit) {
    circuit.validate();
    std::string out;
    out += kHeader;
    out += '\n';
    out += kInclude;
    out += '\n';
    for (const auto& comment : circuit.comments) {
        out += "//";
        if (!comment.empty()) {
            out += ' ';
            out += comment;
        }
        out += '\n';
    }
    out += "qreg q[" + std::to_string(circuit.num_qubits) + "];\n";
    if (!circuit.measured_qubits.empty()) {
        out += "creg c[" + std::to_string(circuit.measured_qubits.size()) + "];\n";
    }
    for (const auto& op : circuit.ops) {
        if (const auto* u = std::get_if<U3Gate>(&op)) {
            out += "u3(" + format_double(u->theta) + "," + format_double(u->phi) + "," + format_double(u->lambda) +
                   ") q[" + std::to_string(u->qubit) + "];\n";
        } else {
            const auto& g = std::get<CnotGate>(op);
            out += "cx q[" + std::to_string(g.control) + "],q[" + std::to_string(g.target) + "];\n";
        }
    }
    for (std::size_t k = 0; k < circuit.measured_qubits.size(); ++k) {
        out += "measure q[" + std::to_string(circuit.measured_qubits[k]) + "] -> c[" + std::to_string(k) + "];\n";
    }
    return out;
}

Circuit parse_qasm(std::string_view text) {
    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start <= text.size();) {
        const std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) {
                lines.push_back(text.substr(start));
            }
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    for (auto& l : lines) {
        if (!l.empty() && l.back() == '\r') {
            l.remove_suffix(1);
        }
    }

    Circuit circuit;
    std::optional<std::size_t> qubits;
    std::optional<std::size_t> clbits;
    std::vector<std::optional<std::size_t>> measured;
    bool measuring = false;
    bool included = false;

    if (lines.empty() || lines[0] != kHeader) {
        LineReader r(lines.empty() ? std::string_view{} : lines[0], 1);
        r.expect(kHeader);
        r.fail("trailing characters after header");
    }

    for (std::size_t n = 1; n < lines.size(); ++n) {
        const std::size_t line_no = n + 1;
        LineReader r(lines[n], line_no);
        if (r.at_end()) {
            continue;
        }
        const std::size_t start = r.position();
        if (lines[n].substr(start, 2) == "//") {
            std::string_view body = lines[n].substr(start + 2);
            if (!body.empty() && body.front() == ' ') {
                body.remove_prefix(1);
            }
            circuit.comments.emplace_back(body);
            continue;
        }
        const std::string word = r.identifier();
        if (word == "include") {
            r.rewind(start);
            r.expect(kInclude.substr(0, kInclude.size() - 1));
            if (included || qubits) {
                r.rewind(start);
                r.fail("include must directly follow the header");
            }
            included = true;
        } else if (word == "qreg") {
            if (qubits) {
                r.rewind(start);
                r.fail("only one quantum register is supported");
            }
            const std::string name = r.identifier();
            if (name != "q") {
                r.rewind(start);
                r.fail("quantum register must be named q");
            }
            r.expect("[");
            const std::size_t at = r.position();
            qubits = r.index();
            if (*qubits == 0 || *qubits > 16) {
                r.rewind(at);
                r.fail("register size must be between 1 and 16");
            }
            r.expect("]");
        } else if (word == "creg") {
            if (!qubits || clbits) {
                r.rewind(start);
                r.fail("classical register must follow the quantum register, once");
            }
            const std::string name = r.identifier();
            if (name != "c") {
                r.rewind(start);
                r.fail("classical register must be named c");
            }
            r.expect("[");
            const std::size_t at = r.position();
            clbits = r.index();
            if (*clbits == 0 || *clbits > *qubits) {
                r.rewind(at);
                r.fail("classical register size out of range");
            }
            r.expect("]");
            measured.assign(*clbits, std::nullopt);
        } else if (word == "u3" || word == "cx") {
            if (!qubits) {
                r.rewind(start);
                r.fail("gate before qreg declaration");
            }
            if (measuring) {
                r.rewind(start);
                r.fail("gates after measurement are not supported");
            }
            if (word == "u3") {
                U3Gate g;
                r.expect("(");
                g.theta = r.real();
                r.expect(",");
                g.phi = r.real();
                r.expect(",");
                g.lambda = r.real();
                r.expect(")");
                g.qubit = r.reference("q", *qubits);
                circuit.ops.emplace_back(g);
            } else {
                CnotGate g;
                g.control = r.reference("q", *qubits);
                r.expect(",");
                const std::size_t at = r.position();
                g.target = r.reference("q", *qubits);
                if (g.target == g.control) {
                    r.rewind(at);
                    r.fail("cx control and target coincide");
                }
                circuit.ops.emplace_back(g);
            }
        } else if (word == "measure") {
            if (!clbits) {
                r.rewind(start);
                r.fail("measure before creg declaration");
            }
            measuring = true;
            const std::size_t q = r.reference("q", *qubits);
            r.expect("->");
            const std::size_t at = r.position();
            const std::size_t k = r.reference("c", *clbits);
            if (measured[k]) {
                r.rewind(at);
                r.fail("classical bit written twice");
            }
            for (const auto& m : measured) {
                if (m && *m == q) {
                    r.rewind(start);
                    r.fail("qubit measured twice");
                }
            }
            measured[k] = q;
        } else {
            r.rewind(start);
            r.fail("unsupported statement '" + word + "'");
        }
        r.expect(";");
        if (!r.at_end()) {
            r.fail("unexpected characters after ';'");
        }
    }

    if (!included) {
        throw QasmParseError("missing include \"qelib1.inc\"", 2, 1);
    }
    if (!qubits) {
        throw QasmParseError("missing qreg declaration", lines.size(), 1);
    }
    circuit.num_qubits = *qubits;
    for (std::size_t k = 0; k < measured.size(); ++k) {
        if (!measured[k]) {
            throw QasmParseError("classical bit c[" + std::to_string(k) + "] never measured", lines.size(), 1);
        }
        circuit.measured_qubits.push_back(*measured[k]);
    }
    return circuit;
}

}  // namespace qlike
