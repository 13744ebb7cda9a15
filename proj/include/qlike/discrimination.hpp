#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qlike/likelihood.hpp"
#include "qlike/numerics.hpp"

namespace qlike {

/// Purity angle beta and Bloch-plane separation delta, both in [0, pi].
class PreparationParams {
public:
    PreparationParams(double beta, double delta);

    double beta() const { return beta_; }
    double delta() const { return delta_; }

private:
    double beta_;
    double delta_;
};

struct StatePair {
    DensityMatrix rho_a;
    DensityMatrix rho_b;
};

/// Orthonormal measurement basis; the basis vectors are the columns.
class MeasurementBasis {
public:
    explicit MeasurementBasis(UnitaryMatrix unitary);

    const UnitaryMatrix& unitary() const { return unitary_; }
    std::size_t dimension() const { return unitary_.dimension(); }

private:
    UnitaryMatrix unitary_;
};

/// Outcome distribution. Entries above -1e-12 are clamped to zero and the
/// total must be 1 within 1e-10.
class ProbDist {
public:
    static ProbDist from(std::vector<double> probs);

    std::span<const double> probs() const { return probs_; }
    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    explicit ProbDist(std::vector<double> probs) : probs_(std::move(probs)) {}
    std::vector<double> probs_;
};

enum class SearchGroup { so4, su4 };
enum class Strategy { direct, entangled };

std::string_view to_string(SearchGroup group);
std::string_view to_string(Strategy strategy);
SearchGroup parse_search_group(std::string_view text);
Strategy parse_strategy(std::string_view text);

struct OptimizerConfig {
    double step_size = 0.3;
    double cooling = 0.95;
    std::uint64_t iterations = 5000;
    std::uint64_t restarts = 8;
    std::uint64_t seed = 0;
    /// Stop threshold on S_rel improvements during local refinement.
    double tolerance = 1e-12;
    /// Consecutive rejected proposals before the step is cooled.
    std::uint64_t stall_window = 20;
    SearchGroup search_group = SearchGroup::so4;
    /// Keep bases with q_i = 0 < p_i (infinite divergence) as optimizer states.
    bool allow_infinite = false;
    /// Newton refinement on the group after each walk.
    bool polish = true;
    std::uint64_t workers = 1;
    std::uint64_t direct_grid_points = 10000;
    double direct_angle_tolerance = 1e-10;

    /// Throws ConfigError.
    void validate() const;
};

struct StrategyReport {
    Strategy strategy = Strategy::direct;
    /// Relative entropy per measured qubit, nats.
    double s_rel = 0.0;
    MeasurementBasis basis;
    std::optional<double> phi_star;
    /// Per-pair value of the two-qubit basis (entangled only).
    std::optional<double> raw_pair_value;
    /// Per-pair value of the separable warm start (entangled only).
    std::optional<double> separable_pair_value;
    /// Best value reached by each restart, per pair (entangled only).
    std::vector<double> restart_values;
    bool degenerate = false;
    std::uint64_t seed = 0;
    OptimizerConfig config;

    double pair_value() const { return 2.0 * s_rel; }
    bool improved_over_separable() const;
};

StatePair prepare_states(const PreparationParams& params);

/// R_y(angle) rho R_y(angle)^dagger.
DensityMatrix rotate_xz(const DensityMatrix& rho, double angle);

ProbDist measurement_distribution(const DensityMatrix& rho, const MeasurementBasis& basis);

Divergence relative_entropy_of_basis(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                     const MeasurementBasis& basis);

/// Basis whose vectors point along +-(sin phi, 0, cos phi) on the Bloch sphere.
MeasurementBasis basis_from_angle(double phi);

StrategyReport optimize_direct(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                               const OptimizerConfig& cfg = {});

StrategyReport optimize_entangled(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                                  const OptimizerConfig& cfg = {});

/// C = exp(-N s_rel) / sqrt(2 pi N p (1 - p)).
double confidence_decay(std::uint64_t n, double s_rel, double p);
/// ln C, usable where C itself underflows.
double log_confidence_decay(std::uint64_t n, double s_rel, double p);

}  // namespace qlike
