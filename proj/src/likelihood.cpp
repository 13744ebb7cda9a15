#include "qlike/likelihood.hpp"

#include <ostream>
#include <string>

#include "qlike/errors.hpp"
#include "qlike/format.hpp"
#include "qlike/rng.hpp"

namespace qlike {

BinaryDist::BinaryDist(double p_head) : p_head_(p_head) {
    if (!(p_head >= 0.0 && p_head <= 1.0)) {
        throw DomainError("BinaryDist: p_head = " + std::to_string(p_head) + " outside [0, 1]");
    }
}

TossRecord::TossRecord(std::uint64_t n_total, std::uint64_t n_heads) : n_total_(n_total), n_heads_(n_heads) {
    if (n_total == 0) {
        throw DomainError("TossRecord: n_total must be at least 1");
    }
    if (n_heads > n_total) {
        throw DomainError("TossRecord: n_heads exceeds n_total");
    }
}

BinaryDist TossRecord::observed() const {
    return BinaryDist(static_cast<double>(n_heads_) / static_cast<double>(n_total_));
}

Divergence kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw DimensionError("kl_divergence: distributions have different lengths");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) {
            continue;
        }
        if (q[i] <= 0.0) {
            return Divergence::infinity();
        }
        sum += p[i] * std::log(p[i] / q[i]);
    }
    // Rounding can leave tiny negatives for equal inputs.
    return {std::max(sum, 0.0)};
}

Divergence kl_binary(BinaryDist pa, BinaryDist pb) {
    const double p[2] = {pa.p_head(), pa.p_tail()};
    const double q[2] = {pb.p_head(), pb.p_tail()};
    return kl_divergence(p, q);
}

LogLikelihood multinomial_log_likelihood(std::span<const std::uint64_t> counts, std::span<const double> probs) {
    if (counts.size() != probs.size()) {
        throw DimensionError("multinomial_log_likelihood: counts and probabilities differ in length");
    }
    std::uint64_t total = 0;
    double value = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        total += counts[i];
        if (counts[i] == 0) {
            continue;
        }
        if (probs[i] <= 0.0) {
            return {-std::numeric_limits<double>::infinity()};
        }
        value += static_cast<double>(counts[i]) * std::log(probs[i]) - std::lgamma(static_cast<double>(counts[i]) + 1.0);
    }
    value += std::lgamma(static_cast<double>(total) + 1.0);
    return {value};
}

LogLikelihood exact_log_likelihood(const TossRecord& tosses, BinaryDist model) {
    const std::uint64_t counts[2] = {tosses.n_heads(), tosses.n_tails()};
    const double probs[2] = {model.p_head(), model.p_tail()};
    return multinomial_log_likelihood(counts, probs);
}

double approx_log_likelihood(const TossRecord& tosses, BinaryDist model) {
    if (tosses.n_heads() == 0 || tosses.n_heads() == tosses.n_total()) {
        throw DomainError("approx_log_likelihood: observed frequency is degenerate (N_H = 0 or N_H = N)");
    }
    const BinaryDist observed = tosses.observed();
    const Divergence d = kl_binary(observed, model);
    if (d.infinite()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double n = static_cast<double>(tosses.n_total());
    const double p = observed.p_head();
    return -n * d.nats - 0.5 * std::log(2.0 * std::numbers::pi * n * p * (1.0 - p));
}

std::vector<CurvePoint> likelihood_curve(BinaryDist p_true, BinaryDist model, std::uint64_t n_max,
                                         std::uint64_t seed) {
    if (n_max == 0) {
        throw DomainError("likelihood_curve: n_max must be at least 1");
    }
    Rng rng(seed);
    std::vector<CurvePoint> curve;
    curve.reserve(n_max);
    std::uint64_t heads = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        if (rng.uniform() < p_true.p_head()) {
            ++heads;
        }
        curve.push_back({n, exact_log_likelihood(TossRecord(n, heads), model)});
    }
    return curve;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
    out << "N,log_likelihood\n";
    for (const auto& point : curve) {
        out << point.n << ',' << format_double(point.log_likelihood.nats) << '\n';
    }
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError("fit_line: x and y differ in length");
    }
    if (x.size() < 3) {
        throw DomainError("fit_line: need at least 3 points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw DomainError("fit_line: x values are all equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    return fit;
}

}  // namespace qlike
