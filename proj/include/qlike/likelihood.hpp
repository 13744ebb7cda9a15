#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace qlike {

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

/// Relative entropy in nats. Disjoint support is reported as `nats == +inf`
/// and must be checked through `infinite()`.
struct Divergence {
    double nats = 0.0;

    bool infinite() const { return std::isinf(nats); }
    double bits() const { return nats_to_bits(nats); }

    static Divergence infinity() { return {std::numeric_limits<double>::infinity()}; }
};

/// Log-probability in nats; an impossible observation is `-inf`.
struct LogLikelihood {
    double nats = 0.0;

    bool impossible() const { return std::isinf(nats) && nats < 0.0; }
};

/// Two-outcome distribution {p, 1 - p}.
class BinaryDist {
public:
    explicit BinaryDist(double p_head);

    double p_head() const { return p_head_; }
    double p_tail() const { return 1.0 - p_head_; }

private:
    double p_head_;
};

/// N tosses with N_H heads.
class TossRecord {
public:
    TossRecord(std::uint64_t n_total, std::uint64_t n_heads);

    std::uint64_t n_total() const { return n_total_; }
    std::uint64_t n_heads() const { return n_heads_; }
    std::uint64_t n_tails() const { return n_total_ - n_heads_; }
    /// Observed frequency distribution {N_H/N, N_T/N}.
    BinaryDist observed() const;

private:
    std::uint64_t n_total_;
    std::uint64_t n_heads_;
};

/// D(p || q) = sum p_i ln(p_i / q_i), with 0 ln(0/q) = 0.
Divergence kl_divergence(std::span<const double> p, std::span<const double> q);

Divergence kl_binary(BinaryDist pa, BinaryDist pb);

/// ln[ N!/(N_H! N_T!) q^N_H (1-q)^N_T ] evaluated through lgamma.
LogLikelihood exact_log_likelihood(const TossRecord& tosses, BinaryDist model);

/// ln[ N!/prod(n_i!) prod(q_i^n_i) ] for a k-outcome count vector.
LogLikelihood multinomial_log_likelihood(std::span<const std::uint64_t> counts, std::span<const double> probs);

/// Stirling form  -N D(P_A || P_B) - (1/2) ln(2 pi N p (1 - p)),  p = N_H / N.
/// Throws DomainError when N_H is 0 or N; use the exact form there.
double approx_log_likelihood(const TossRecord& tosses, BinaryDist model);

struct CurvePoint {
    std::uint64_t n = 0;
    LogLikelihood log_likelihood;
};

/// Tosses one seeded string from `p_true` and scores every prefix under `model`.
std::vector<CurvePoint> likelihood_curve(BinaryDist p_true, BinaryDist model, std::uint64_t n_max,
                                         std::uint64_t seed);

/// CSV with header `N,log_likelihood`.
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace qlike
