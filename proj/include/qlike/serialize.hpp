#pragma once

#include <nlohmann/json.hpp>

#include "qlike/discrimination.hpp"
#include "qlike/simulator.hpp"
#include "qlike/synthesis.hpp"

namespace qlike {

using Json = nlohmann::ordered_json;

/// Finite values as numbers; infinities as the strings "inf" / "-inf".
Json number_json(double value);
double number_from_json(const Json& j);

/// Row-major list of [re, im] pairs.
Json matrix_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_config_from_json(const Json& j);

Json to_json(const StrategyReport& report);
StrategyReport strategy_report_from_json(const Json& j);

/// Angles in radians at 15 significant digits.
Json to_json(const DecompositionResult& result);

Json to_json(const NoiseModel& noise);
NoiseModel noise_model_from_json(const Json& j);

Json to_json(const ShotCounts& counts);
ShotCounts shot_counts_from_json(const Json& j);

/// Two-space indented dump followed by a newline.
std::string dump(const Json& j);

}  // namespace qlike
