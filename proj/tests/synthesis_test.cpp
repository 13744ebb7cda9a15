#include <gtest/gtest.h>

#include <cmath>

#include "qlike/discrimination.hpp"
#include "qlike/errors.hpp"
#include "qlike/format.hpp"
#include "qlike/serialize.hpp"
#include "qlike/synthesis.hpp"
#include "test_support.hpp"

using namespace qlike;
using qlike::testing::cnot_literal;
using qlike::testing::kron;

namespace {

/// e^{i g} (l5 x l6) CX (l3 x l4) CX (l1 x l2), assembled from the raw angles.
ComplexMatrix rebuild(const DecompositionResult& d) {
    auto m = [&](std::size_t i) { return u3_matrix(d.locals[i].theta, d.locals[i].phi, d.locals[i].lambda); };
    const ComplexMatrix cx = cnot_literal();
    return kron(m(4), m(5)) * cx * kron(m(2), m(3)) * cx * kron(m(0), m(1)) * std::polar(1.0, d.global_phase);
}

void expect_invariants_close(const MakhlinInvariants& a, const MakhlinInvariants& b, double tol) {
    EXPECT_NEAR(std::abs(a.g1 - b.g1), 0.0, tol);
    EXPECT_NEAR(a.g2, b.g2, tol);
}

}  // namespace

TEST(U3, MatchesStandardDefinition) {
    const double t = 0.3, p = 1.1, l = -0.4;
    const ComplexMatrix u = u3_matrix(t, p, l);
    EXPECT_NEAR(std::abs(u(0, 0) - std::cos(t / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(0, 1) + std::polar(1.0, l) * std::sin(t / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(1, 0) - std::polar(1.0, p) * std::sin(t / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(1, 1) - std::polar(1.0, p + l) * std::cos(t / 2)), 0.0, 1e-15);
    EXPECT_EQ(max_abs_diff(cnot_matrix(), cnot_literal()), 0.0);
}

TEST(ZyzDecompose, Examples) {
    const ZyzResult id = zyz_decompose(UnitaryMatrix::from(ComplexMatrix::identity(2)));
    EXPECT_NEAR(id.gate.theta, 0.0, 1e-15);
    EXPECT_NEAR(id.gate.phi + id.gate.lambda, 0.0, 1e-15);
    EXPECT_NEAR(id.global_phase, 0.0, 1e-15);

    const double delta = 1.8;
    const ZyzResult r = zyz_decompose(UnitaryMatrix::from(ry(delta)));
    EXPECT_NEAR(r.gate.theta, delta, 1e-14);
    EXPECT_NEAR(r.gate.phi, 0.0, 1e-14);
    EXPECT_NEAR(r.gate.lambda, 0.0, 1e-14);
}

TEST(ZyzDecompose, RandomRoundTrip) {
    Rng rng(81);
    for (int trial = 0; trial < 1000; ++trial) {
        const ComplexMatrix u = qlike::testing::random_unitary(rng, 2);
        const ZyzResult z = zyz_decompose(UnitaryMatrix::from(u));
        EXPECT_LE(max_abs_diff(z.gate.matrix() * std::polar(1.0, z.global_phase), u), 1e-10);
    }
    // Diagonal and anti-diagonal edge cases.
    for (const ComplexMatrix& u : {pauli::x(), pauli::z(), pauli::y(), rz(0.3), ComplexMatrix(2, 2, {0, 1, 1, 0})}) {
        const ZyzResult z = zyz_decompose(UnitaryMatrix::from(u));
        EXPECT_LE(max_abs_diff(z.gate.matrix() * std::polar(1.0, z.global_phase), u), 1e-12);
    }
}

TEST(MakhlinInvariants, Examples) {
    const auto id = makhlin_invariants(UnitaryMatrix::from(ComplexMatrix::identity(4)));
    EXPECT_NEAR(std::abs(id.g1 - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(id.g2, 3.0, 1e-12);
    const auto cx = makhlin_invariants(UnitaryMatrix::from(cnot_literal()));
    EXPECT_NEAR(std::abs(cx.g1), 0.0, 1e-12);
    EXPECT_NEAR(cx.g2, 1.0, 1e-12);
}

TEST(MakhlinInvariants, LocalDressingInvariance) {
    Rng rng(83);
    for (int trial = 0; trial < 1000; ++trial) {
        const ComplexMatrix u = qlike::testing::random_unitary(rng, 4);
        const ComplexMatrix left = kron(qlike::testing::random_unitary(rng, 2), qlike::testing::random_unitary(rng, 2));
        const ComplexMatrix right = kron(qlike::testing::random_unitary(rng, 2), qlike::testing::random_unitary(rng, 2));
        expect_invariants_close(makhlin_invariants(UnitaryMatrix::from(u)),
                                makhlin_invariants(UnitaryMatrix::from(left * u * right)), 1e-9);
    }
}

TEST(DecomposeTwoQubit, SeparableInput) {
    Rng rng(85);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix u = kron(qlike::testing::random_unitary(rng, 2), qlike::testing::random_unitary(rng, 2));
        const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(u));
        EXPECT_LE(d.residual, 1e-8);
        EXPECT_LE(max_abs_diff(rebuild(d), u), 1e-8);
        // Mid layer snapped to identity-equivalents.
        EXPECT_LE(max_abs_diff_up_to_phase(d.locals[2].matrix(), ComplexMatrix::identity(2)), 1e-12);
        EXPECT_LE(max_abs_diff_up_to_phase(d.locals[3].matrix(), ComplexMatrix::identity(2)), 1e-12);
    }
}

TEST(DecomposeTwoQubit, Cnot) {
    const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(cnot_literal()));
    EXPECT_LE(d.residual, 1e-8);
    EXPECT_LE(max_abs_diff(rebuild(d), cnot_literal()), 1e-8);
    EXPECT_EQ(d.cnots[0].control, 0u);
    EXPECT_EQ(d.cnots[1].target, 1u);
}

TEST(DecomposeTwoQubit, TargetsAssigned) {
    const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(cnot_literal()));
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(d.locals[i].target, i % 2);
}

TEST(DecomposeTwoQubit, OptimizerOutput) {
    const StatePair s = prepare_states(PreparationParams(0.2, 1.8));
    OptimizerConfig cfg;
    cfg.seed = 2;
    const StrategyReport r = optimize_entangled(s.rho_a, s.rho_b, cfg);
    for (const ComplexMatrix& u : {r.basis.unitary().matrix(), r.basis.unitary().matrix().adjoint()}) {
        const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(u));
        EXPECT_LE(d.residual, 1e-8);
        const ComplexMatrix back = rebuild(d);
        EXPECT_LE(max_abs_diff(back, u), 1e-8);
        expect_invariants_close(makhlin_invariants(UnitaryMatrix::from(back, 1e-8)),
                                makhlin_invariants(UnitaryMatrix::from(u)), 1e-9);
    }
}

TEST(DecomposeTwoQubit, RandomSpecialOrthogonal) {
    Rng rng(87);
    for (int trial = 0; trial < 1000; ++trial) {
        const ComplexMatrix u = qlike::testing::random_so4(rng);
        const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(u));
        EXPECT_LE(d.residual, 1e-8);
        EXPECT_LE(max_abs_diff(rebuild(d), u), 1e-8);
        EXPECT_NEAR(d.criterion.chi.imag(), 0.0, 1e-9);
        EXPECT_TRUE(d.criterion.two_cnots_suffice);
    }
}

TEST(DecomposeTwoQubit, AnyTwoCnotCircuitPasses) {
    Rng rng(89);
    for (int trial = 0; trial < 300; ++trial) {
        ComplexMatrix u = kron(qlike::testing::random_unitary(rng, 2), qlike::testing::random_unitary(rng, 2));
        for (int layer = 0; layer < 2; ++layer) {
            u = kron(qlike::testing::random_unitary(rng, 2), qlike::testing::random_unitary(rng, 2)) * cnot_literal() *
                u;
        }
        const CnotCountCriterion c = cnot_count_criterion(UnitaryMatrix::from(u));
        EXPECT_TRUE(c.two_cnots_suffice) << "distance " << c.distance_to_two_cnot_class;
        const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(u));
        EXPECT_LE(max_abs_diff(rebuild(d), u), 1e-8);
    }
}

TEST(DecomposeTwoQubit, GenericUnitaryNeedsThreeCnots) {
    Rng rng(91);
    int rejected = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexMatrix u = qlike::testing::random_unitary(rng, 4);
        const CnotCountCriterion c = cnot_count_criterion(UnitaryMatrix::from(u));
        if (c.two_cnots_suffice) {
            const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(u));
            EXPECT_LE(d.residual, 1e-8);
            continue;
        }
        try {
            decompose_two_qubit(UnitaryMatrix::from(u));
            ADD_FAILURE() << "expected SynthesisError";
        } catch (const SynthesisError& e) {
            ++rejected;
            EXPECT_FALSE(e.criterion().two_cnots_suffice);
            EXPECT_GT(e.criterion().distance_to_two_cnot_class, kTwoCnotTolerance);
            EXPECT_NE(std::string(e.what()).find("3 CNOTs"), std::string::npos);
        }
    }
    EXPECT_GT(rejected, 190);
}

TEST(DecomposeTwoQubit, NonUnitaryRejectedUpstream) {
    EXPECT_THROW(UnitaryMatrix::from(ComplexMatrix::identity(4) * 1.1), DomainError);
}

TEST(DecomposeTwoQubit, ReconstructMethodAgrees) {
    Rng rng(93);
    const ComplexMatrix u = qlike::testing::random_so4(rng);
    const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(u));
    EXPECT_LE(max_abs_diff(d.reconstruct(), rebuild(d)), 1e-14);
}

TEST(DecomposeTwoQubit, JsonAnglesRounded) {
    const DecompositionResult d = decompose_two_qubit(UnitaryMatrix::from(cnot_literal()));
    const Json j = to_json(d);
    ASSERT_EQ(j.at("locals").size(), 6u);
    ASSERT_EQ(j.at("cnots").size(), 2u);
    EXPECT_EQ(j.at("locals")[0].at("theta").get<double>(), round_to_digits(d.locals[0].theta, 15));
    EXPECT_TRUE(j.at("criterion").at("two_cnots_suffice").get<bool>());
}
