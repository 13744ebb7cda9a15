#include <gtest/gtest.h>

#include "qlike/discrimination.hpp"
#include "qlike/qasm.hpp"
#include "qlike/simulator.hpp"
#include "test_support.hpp"

using namespace qlike;

namespace {

int count_lines_starting(const std::string& text, const std::string& prefix) {
    int n = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = text.find('\n', pos);
        if (text.compare(pos, prefix.size(), prefix) == 0) ++n;
        pos = end == std::string::npos ? text.size() : end + 1;
    }
    return n;
}

}  // namespace

TEST(EmitQasm, EmptyCircuit) {
    Circuit c;
    c.num_qubits = 1;
    c.measured_qubits = {0};
    EXPECT_EQ(emit_qasm(c),
              "OPENQASM 2.0;\n"
              "include \"qelib1.inc\";\n"
              "qreg q[1];\n"
              "creg c[1];\n"
              "measure q[0] -> c[0];\n");
}

TEST(EmitQasm, AnglePrecisionAndCnot) {
    Circuit c;
    c.num_qubits = 2;
    c.ops = {U3Gate{0.1, -std::numbers::pi, 1e-20, 1}, CnotGate{1, 0}};
    c.measured_qubits = {1};
    const std::string text = emit_qasm(c);
    EXPECT_NE(text.find("u3(0.1,-3.14159265358979,1e-20) q[1];\n"), std::string::npos) << text;
    EXPECT_NE(text.find("cx q[1],q[0];\n"), std::string::npos);
    EXPECT_NE(text.find("measure q[1] -> c[0];\n"), std::string::npos);
}

TEST(EmitQasm, DirectStrategyCircuit) {
    const PreparationParams params(0.2, 1.8);
    const StatePair s = prepare_states(params);
    const auto d = optimize_direct(s.rho_a, s.rho_b);
    const std::string text = emit_qasm(build_circuit(params, Strategy::direct, d.basis, PreparedState::a));
    EXPECT_NO_THROW(parse_qasm(text));
    EXPECT_EQ(count_lines_starting(text, "cx "), 2);
}

TEST(EmitQasm, EntangledStrategyCircuit) {
    const PreparationParams params(0.2, 1.8);
    const StatePair s = prepare_states(params);
    OptimizerConfig cfg;
    cfg.seed = 3;
    const auto e = optimize_entangled(s.rho_a, s.rho_b, cfg);
    const Circuit c = build_circuit(params, Strategy::entangled, e.basis, PreparedState::a);
    const std::string text = emit_qasm(c);
    EXPECT_EQ(count_lines_starting(text, "cx "), 4);
    // Between the second preparation CNOT and the measurements: six locals and two CNOTs.
    std::size_t first_mid = 0;
    int cnots_seen = 0;
    while (cnots_seen < 2) {
        if (std::holds_alternative<CnotGate>(c.ops[first_mid])) ++cnots_seen;
        ++first_mid;
    }
    int locals = 0;
    for (std::size_t i = first_mid; i < c.ops.size(); ++i) locals += std::holds_alternative<U3Gate>(c.ops[i]);
    EXPECT_EQ(locals, 6);
}

TEST(ParseQasm, RoundTripRandomCircuits) {
    Rng rng(111);
    for (int trial = 0; trial < 100; ++trial) {
        const Circuit c = qlike::testing::random_circuit(rng);
        const std::string text = emit_qasm(c);
        const Circuit parsed = parse_qasm(text);
        EXPECT_EQ(emit_qasm(parsed), text);
        const ProbDist p = born_probabilities(c), q = born_probabilities(parsed);
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
    }
}

TEST(ParseQasm, MalformedHeader) {
    try {
        parse_qasm("OPENQASM 3.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n");
        FAIL() << "expected QasmParseError";
    } catch (const QasmParseError& e) {
        EXPECT_EQ(e.line(), 1u);
    }
    EXPECT_THROW(parse_qasm(""), QasmParseError);
}

TEST(ParseQasm, ErrorPositions) {
    const std::string head = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n";
    try {
        parse_qasm(head + "h q[0];\n");
        FAIL();
    } catch (const QasmParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_EQ(e.column(), 1u);
    }
    try {
        parse_qasm(head + "cx q[0],q[7];\n");
        FAIL();
    } catch (const QasmParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_EQ(e.column(), 11u);
    }
    try {
        parse_qasm(head + "u3(0.1,abc,0) q[0];\n");
        FAIL();
    } catch (const QasmParseError& e) {
        EXPECT_EQ(e.column(), 8u);
    }
    EXPECT_THROW(parse_qasm(head + "creg c[1];\nmeasure q[0] -> c[0];\nu3(0,0,0) q[0];\n"), QasmParseError);
    EXPECT_THROW(parse_qasm(head + "u3(0,0,0) q[0]\n"), QasmParseError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0;\nqreg q[1];\n"), QasmParseError);
}

TEST(ParseQasm, ToleratesWhitespaceAndCrlf) {
    const Circuit c = parse_qasm(
        "OPENQASM 2.0;\r\ninclude \"qelib1.inc\";\r\n\r\nqreg q[2];\ncreg c[1];\n  u3( 1 , 2 , 3 )  q[1] ;\n"
        "cx q[0], q[1];\nmeasure q[1]->c[0];\n");
    ASSERT_EQ(c.ops.size(), 2u);
    EXPECT_EQ(std::get<U3Gate>(c.ops[0]), (U3Gate{1, 2, 3, 1}));
    EXPECT_EQ(c.measured_qubits, (std::vector<std::size_t>{1}));
}
