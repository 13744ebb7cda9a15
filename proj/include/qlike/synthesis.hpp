#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "qlike/numerics.hpp"

namespace qlike {

/// u3(theta, phi, lambda) =
///   [[cos(theta/2),            -e^{i lambda} sin(theta/2)],
///    [e^{i phi} sin(theta/2),   e^{i(phi+lambda)} cos(theta/2)]]
ComplexMatrix u3_matrix(double theta, double phi, double lambda);

/// CNOT with the first (most significant) qubit as control.
ComplexMatrix cnot_matrix();

struct SingleQubitGate {
    double theta = 0.0;
    double phi = 0.0;
    double lambda = 0.0;
    std::size_t target = 0;

    ComplexMatrix matrix() const { return u3_matrix(theta, phi, lambda); }
};

struct ZyzResult {
    SingleQubitGate gate;
    /// u = e^{i global_phase} u3(theta, phi, lambda).
    double global_phase = 0.0;
};

ZyzResult zyz_decompose(const UnitaryMatrix& u);

struct MakhlinInvariants {
    Complex g1;
    double g2 = 0.0;
};

MakhlinInvariants makhlin_invariants(const UnitaryMatrix& u);

/// Interaction content exp(i (cx XX + cy YY + cz ZZ)) of a two-qubit gate,
/// each coordinate reduced into (-pi/4, pi/4].
struct CanonicalCoordinates {
    double cx = 0.0;
    double cy = 0.0;
    double cz = 0.0;
};

struct CnotCountCriterion {
    /// tr[ U (Y x Y) U^T (Y x Y) ] for U normalized into SU(4); real exactly
    /// when two CNOTs suffice.
    Complex chi;
    CanonicalCoordinates coordinates;
    MakhlinInvariants invariants;
    /// Smallest distance of a canonical coordinate from 0.
    double distance_to_two_cnot_class = 0.0;
    bool two_cnots_suffice = false;
};

inline constexpr double kTwoCnotTolerance = 1e-9;
inline constexpr double kSeparableTolerance = 1e-10;
inline constexpr double kMaxResidual = 1e-8;

CnotCountCriterion cnot_count_criterion(const UnitaryMatrix& u);

/// Raised for unitaries outside the two-CNOT class.
class SynthesisError : public std::runtime_error {
public:
    SynthesisError(const std::string& message, CnotCountCriterion criterion)
        : std::runtime_error(message), criterion_(criterion) {}

    const CnotCountCriterion& criterion() const { return criterion_; }

private:
    CnotCountCriterion criterion_;
};

struct CnotPlacement {
    std::size_t control = 0;
    std::size_t target = 1;
};

/// u = e^{i global_phase} (l5 x l6) CNOT (l3 x l4) CNOT (l1 x l2), where
/// locals = {l1, l2, l3, l4, l5, l6} and l1, l3, l5 act on the first qubit.
struct DecompositionResult {
    std::array<SingleQubitGate, 6> locals;
    std::array<CnotPlacement, 2> cnots;
    double global_phase = 0.0;
    double residual = 0.0;
    CnotCountCriterion criterion;

    ComplexMatrix reconstruct() const;
};

/// Throws SynthesisError when three CNOTs would be needed.
DecompositionResult decompose_two_qubit(const UnitaryMatrix& u);

}  // namespace qlike
