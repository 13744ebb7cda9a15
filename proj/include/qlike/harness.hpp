#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlike/discrimination.hpp"
#include "qlike/serialize.hpp"
#include "qlike/simulator.hpp"

namespace qlike {

std::string_view tool_version();

/// Metadata block embedded in every output file.
Json metadata_json(const std::string& command, std::uint64_t seed, const Json& parameters);

StrategyReport run_strategy(const PreparationParams& params, Strategy strategy, const OptimizerConfig& cfg);

struct CompareResult {
    double beta = 0.0;
    double delta = 0.0;
    StrategyReport direct;
    StrategyReport entangled;

    /// ent - dir per measured qubit, nats.
    double diff() const { return entangled.s_rel - direct.s_rel; }
    bool degenerate() const { return direct.degenerate || entangled.degenerate; }
};

CompareResult run_compare(const PreparationParams& params, const OptimizerConfig& cfg);

/// One (unit, normalization) view of the comparison.
struct NormalizedValues {
    std::string unit;           // "nats" | "bits"
    std::string normalization;  // "per_qubit" | "per_pair"
    double direct = 0.0;
    double entangled = 0.0;
    double diff = 0.0;
};

std::vector<NormalizedValues> normalized_values(const CompareResult& result);

struct ReferenceMatch {
    NormalizedValues values;
    double direct_relative_error = 0.0;
    double entangled_relative_error = 0.0;
    bool matches = false;
};

inline constexpr double kReferenceTolerance = 0.005;

/// Checks all four conventions against reference (direct, entangled) values.
std::vector<ReferenceMatch> match_reference(const CompareResult& result, double reference_direct,
                                            double reference_entangled, double rel_tol = kReferenceTolerance);

struct Reference {
    double direct = 0.0;
    double entangled = 0.0;
};

Json compare_json(const CompareResult& result, const std::optional<Reference>& reference);
std::string compare_text(const CompareResult& result, const std::optional<Reference>& reference);

struct CurveOptions {
    std::uint64_t n_max = 2000;
    /// Circuit shots between rows; each shot measures two qubits.
    std::uint64_t shots_per_point = 1;
    NoiseModel noise;
    std::uint64_t seed = 0;
    bool include_direct = true;
    bool include_entangled = true;
};

struct CurveRow {
    /// Measured qubits so far.
    std::uint64_t n = 0;
    std::optional<double> direct;
    std::optional<double> entangled;
};

struct CurveResult {
    std::vector<CurveRow> rows;
    std::optional<StrategyReport> direct;
    std::optional<StrategyReport> entangled;
};

/// Samples qubit strings from the A circuits and scores every prefix under the
/// noiseless B-circuit distribution at each strategy's optimal basis.
CurveResult run_curve(const PreparationParams& params, const OptimizerConfig& cfg, const CurveOptions& options);

/// CSV: `#` metadata lines, then `N,log_likelihood_direct,log_likelihood_entangled`.
std::string curve_csv(const CurveResult& result, const Json& metadata);

struct ExportedCircuits {
    Circuit a;
    Circuit b;
    StrategyReport report;
};

ExportedCircuits build_export(const PreparationParams& params, Strategy strategy, const OptimizerConfig& cfg);

struct SimulationResult {
    ShotCounts counts_a;
    ShotCounts counts_b;
    SrelEstimate estimate;
    StrategyReport report;
    /// Divergence per measured bitstring of the exact (noisy) distributions.
    Divergence exact;
};

SimulationResult run_simulation(const PreparationParams& params, Strategy strategy, const OptimizerConfig& cfg,
                                std::uint64_t shots, const NoiseModel& noise, std::uint64_t seed,
                                std::uint64_t workers);

/// Flat `key = value` config text; `#` starts a comment. Keys may be written
/// with or without a leading `--`.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

}  // namespace qlike
