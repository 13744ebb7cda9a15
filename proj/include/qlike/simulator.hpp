#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qlike/discrimination.hpp"
#include "qlike/likelihood.hpp"

namespace qlike {

// Register layout of the four-qubit discrimination circuits. Qubits b and c
// carry the prepared states; a and d are traced out by never measuring them.
inline constexpr std::size_t kQubitA = 0;
inline constexpr std::size_t kQubitB = 1;
inline constexpr std::size_t kQubitC = 2;
inline constexpr std::size_t kQubitD = 3;

struct U3Gate {
    double theta = 0.0;
    double phi = 0.0;
    double lambda = 0.0;
    std::size_t qubit = 0;

    friend bool operator==(const U3Gate&, const U3Gate&) = default;
};

struct CnotGate {
    std::size_t control = 0;
    std::size_t target = 1;

    friend bool operator==(const CnotGate&, const CnotGate&) = default;
};

using GateOp = std::variant<U3Gate, CnotGate>;

/// Gate list over a fixed register, measured (in computational basis) at the
/// end. Qubit 0 is the most significant subsystem. Outcome index bit k counts
/// from the left: measured_qubits[0] is the leftmost bit of every bitstring.
struct Circuit {
    std::size_t num_qubits = 0;
    std::vector<GateOp> ops;
    std::vector<std::size_t> measured_qubits;
    /// Free-form annotation lines carried into QASM as comments.
    std::vector<std::string> comments;

    /// Throws ConfigError on out-of-range or repeated qubit indices.
    void validate() const;
    std::size_t cnot_count() const;
    std::size_t outcome_count() const { return std::size_t{1} << measured_qubits.size(); }

    friend bool operator==(const Circuit&, const Circuit&) = default;
};

struct NoiseModel {
    double depolarizing_1q = 0.0;
    double depolarizing_2q = 0.0;
    double readout_flip = 0.0;

    void validate() const;
    bool noiseless() const { return depolarizing_1q == 0.0 && depolarizing_2q == 0.0 && readout_flip == 0.0; }
};

struct ShotCounts {
    /// Every outcome bitstring, including zero counts.
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::uint64_t workers = 1;
    NoiseModel noise;

    /// Throws DomainError if the counts do not sum to `shots`.
    void validate() const;
};

enum class PreparedState { a, b };

/// Four-qubit circuit: R_y(beta) on b and c, CNOT b->a and c->d, an extra
/// R_y(delta) on b and c for state B, then the change into `basis` and
/// measurement of b and c.
Circuit build_circuit(const PreparationParams& params, Strategy strategy, const MeasurementBasis& basis,
                      PreparedState which);

std::string outcome_label(std::size_t outcome, std::size_t bits);

/// Exact statevector probabilities of the measured bitstrings.
ProbDist born_probabilities(const Circuit& circuit);

/// Outcome probabilities under `noise` (density-matrix evolution), or the
/// statevector result when the model is noiseless.
ProbDist noisy_probabilities(const Circuit& circuit, const NoiseModel& noise);

/// Seeded sequence of outcome indices from one RNG stream.
std::vector<std::uint32_t> sample_outcomes(const Circuit& circuit, std::uint64_t shots, const NoiseModel& noise,
                                           std::uint64_t seed);

/// Shots are split over `workers`, each with its own derived stream; counts
/// are reproducible for a fixed (seed, workers) pair.
ShotCounts sample_shots(const Circuit& circuit, std::uint64_t shots, const NoiseModel& noise, std::uint64_t seed,
                        std::uint64_t workers = 1);

struct SrelEstimate {
    /// Plug-in divergence of the raw frequencies; infinite when A has counts
    /// in a cell that B never hit.
    Divergence raw;
    /// Plug-in divergence after adding 1/2 to every cell.
    double smoothed = 0.0;
    /// Delta-method standard error of the smoothed estimate.
    double standard_error = 0.0;
};

/// Divergence per shot (i.e. per measured bitstring), in nats.
SrelEstimate estimate_srel_from_counts(const ShotCounts& counts_a, const ShotCounts& counts_b);

}  // namespace qlike
