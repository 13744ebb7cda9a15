#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "qlike/errors.hpp"
#include "qlike/likelihood.hpp"
#include "test_support.hpp"

using namespace qlike;
using qlike::testing::binary_kl;

namespace {

/// ln C(n, k) + k ln q + (n - k) ln(1 - q) summed term by term.
double binomial_log_prob(std::uint64_t n, std::uint64_t k, double q) {
    double log_choose = 0.0;
    for (std::uint64_t i = 1; i <= k; ++i) {
        log_choose += std::log(static_cast<double>(n - k + i)) - std::log(static_cast<double>(i));
    }
    return log_choose + static_cast<double>(k) * std::log(q) + static_cast<double>(n - k) * std::log1p(-q);
}

}  // namespace

TEST(KlBinary, Examples) {
    EXPECT_EQ(kl_binary(BinaryDist(0.5), BinaryDist(0.5)).nats, 0.0);
    const double d = kl_binary(BinaryDist(1.0 / 3), BinaryDist(0.5)).nats;
    EXPECT_NEAR(d, binary_kl(1.0 / 3, 0.5), 1e-15);
    EXPECT_NEAR(d, 0.0566, 5e-5);
    EXPECT_TRUE(kl_binary(BinaryDist(1.0), BinaryDist(0.0)).infinite());
    EXPECT_FALSE(kl_binary(BinaryDist(0.0), BinaryDist(0.3)).infinite());
}

TEST(KlBinary, GibbsInequality) {
    Rng rng(41);
    for (int trial = 0; trial < 10000; ++trial) {
        const double p = rng.uniform(), q = rng.uniform();
        const Divergence d = kl_binary(BinaryDist(p), BinaryDist(q));
        EXPECT_GE(d.nats, 0.0);
        if (std::abs(p - q) > 1e-12) {
            EXPECT_GT(d.nats, 0.0);
        }
    }
}

TEST(KlDivergence, BitsAndInfinity) {
    const std::vector<double> p{0.25, 0.75}, q{0.5, 0.5};
    const Divergence d = kl_divergence(p, q);
    EXPECT_NEAR(d.bits(), d.nats / std::log(2.0), 1e-15);
    const std::vector<double> zero{1.0, 0.0};
    EXPECT_TRUE(kl_divergence(p, zero).infinite());
    EXPECT_THROW(kl_divergence(p, std::vector<double>{1.0}), DimensionError);
}

TEST(BinaryDist, Validation) {
    EXPECT_THROW(BinaryDist(-0.1), DomainError);
    EXPECT_THROW(BinaryDist(1.5), DomainError);
    EXPECT_THROW(TossRecord(0, 0), DomainError);
    EXPECT_THROW(TossRecord(3, 4), DomainError);
}

TEST(ExactLogLikelihood, Examples) {
    EXPECT_NEAR(exact_log_likelihood(TossRecord(1, 1), BinaryDist(0.5)).nats, std::log(0.5), 1e-14);
    EXPECT_NEAR(exact_log_likelihood(TossRecord(2, 1), BinaryDist(0.5)).nats, std::log(0.5), 1e-14);
    EXPECT_NEAR(exact_log_likelihood(TossRecord(10, 9), BinaryDist(0.5)).nats, std::log(10.0 * std::pow(2.0, -10)),
                1e-13);
}

TEST(ExactLogLikelihood, MatchesTermwiseBinomial) {
    Rng rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint64_t n = 1 + rng.next() % 500;
        const std::uint64_t k = rng.next() % (n + 1);
        const double q = qlike::testing::uniform(rng, 0.01, 0.99);
        EXPECT_NEAR(exact_log_likelihood(TossRecord(n, k), BinaryDist(q)).nats, binomial_log_prob(n, k, q),
                    1e-9 * (1 + std::abs(binomial_log_prob(n, k, q))));
    }
}

TEST(ExactLogLikelihood, ImpossibleObservation) {
    EXPECT_TRUE(exact_log_likelihood(TossRecord(5, 2), BinaryDist(0.0)).impossible());
    EXPECT_TRUE(exact_log_likelihood(TossRecord(5, 2), BinaryDist(1.0)).impossible());
    EXPECT_EQ(exact_log_likelihood(TossRecord(5, 5), BinaryDist(1.0)).nats, 0.0);
}

TEST(ApproxLogLikelihood, MatchedModelLeavesPowerLaw) {
    const TossRecord t(100, 25);
    EXPECT_NEAR(approx_log_likelihood(t, BinaryDist(0.25)), -0.5 * std::log(2 * std::numbers::pi * 100 * 0.25 * 0.75),
                1e-12);
}

TEST(ApproxLogLikelihood, CloseToExact) {
    const TossRecord small(100, 33), large(10000, 3333);
    EXPECT_LE(std::abs(approx_log_likelihood(small, BinaryDist(0.5)) -
                       exact_log_likelihood(small, BinaryDist(0.5)).nats),
              0.05);
    EXPECT_LE(std::abs(approx_log_likelihood(large, BinaryDist(0.5)) -
                       exact_log_likelihood(large, BinaryDist(0.5)).nats),
              0.005);
}

TEST(ApproxLogLikelihood, DegenerateCountsRejected) {
    EXPECT_THROW(approx_log_likelihood(TossRecord(10, 0), BinaryDist(0.5)), DomainError);
    EXPECT_THROW(approx_log_likelihood(TossRecord(10, 10), BinaryDist(0.5)), DomainError);
}

TEST(ApproxLogLikelihood, ErrorScalesAsInverseN) {
    // N * |approx - exact| should settle to a constant c.
    std::vector<double> scaled;
    for (const std::uint64_t n : {100, 1000, 10000, 100000}) {
        const TossRecord t(n, n / 3);
        const double err =
            std::abs(approx_log_likelihood(t, BinaryDist(0.5)) - exact_log_likelihood(t, BinaryDist(0.5)).nats);
        scaled.push_back(err * static_cast<double>(n));
    }
    const double c = *std::max_element(scaled.begin(), scaled.end());
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        EXPECT_GT(scaled[i], 0.5 * c) << "N index " << i;
    }
}

TEST(MultinomialLogLikelihood, ReducesToBinomial) {
    const std::vector<std::uint64_t> counts{7, 13};
    const std::vector<double> probs{0.3, 0.7};
    EXPECT_NEAR(multinomial_log_likelihood(counts, probs).nats, binomial_log_prob(20, 7, 0.3), 1e-12);
}

TEST(MultinomialLogLikelihood, ThreeOutcomes) {
    const std::vector<std::uint64_t> counts{2, 1, 3};
    const std::vector<double> probs{0.2, 0.3, 0.5};
    // 6! / (2! 1! 3!) = 60
    const double expected = std::log(60.0) + 2 * std::log(0.2) + std::log(0.3) + 3 * std::log(0.5);
    EXPECT_NEAR(multinomial_log_likelihood(counts, probs).nats, expected, 1e-13);
    const std::vector<double> hole{0.5, 0.0, 0.5};
    EXPECT_TRUE(multinomial_log_likelihood(counts, hole).impossible());
}

TEST(LikelihoodCurve, FirstPointAndDeterminism) {
    const auto a = likelihood_curve(BinaryDist(1.0 / 3), BinaryDist(0.5), 50, 9);
    const auto b = likelihood_curve(BinaryDist(1.0 / 3), BinaryDist(0.5), 50, 9);
    ASSERT_EQ(a.size(), 50u);
    EXPECT_EQ(a.front().n, 1u);
    EXPECT_NEAR(a.front().log_likelihood.nats, std::log(0.5), 1e-14);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].log_likelihood.nats, b[i].log_likelihood.nats);
    }
}

TEST(LikelihoodCurve, MatchedModelIsPowerLawOnly) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto curve = likelihood_curve(BinaryDist(0.5), BinaryDist(0.5), 10000, seed);
        std::vector<double> x, y;
        for (const auto& p : curve) {
            x.push_back(static_cast<double>(p.n));
            y.push_back(p.log_likelihood.nats);
        }
        EXPECT_LT(std::abs(fit_line(x, y).slope), 5e-3) << "seed " << seed;
    }
}

TEST(LikelihoodCurve, SlopeConvergesToDivergence) {
    // Mean fitted slope over 20 fixed seeds at N = 1e5, within 2 standard errors.
    const double d = binary_kl(1.0 / 3, 0.5);
    std::vector<double> slopes;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto curve = likelihood_curve(BinaryDist(1.0 / 3), BinaryDist(0.5), 100000, seed);
        std::vector<double> x, y;
        for (const auto& p : curve) {
            x.push_back(static_cast<double>(p.n));
            y.push_back(p.log_likelihood.nats);
        }
        slopes.push_back(fit_line(x, y).slope);
    }
    const double mean = std::accumulate(slopes.begin(), slopes.end(), 0.0) / slopes.size();
    double var = 0.0;
    for (const double s : slopes) var += (s - mean) * (s - mean);
    const double se = std::sqrt(var / (slopes.size() - 1) / slopes.size());
    EXPECT_LE(std::abs(mean + d), 2 * se) << "mean slope " << mean << " se " << se;
}

TEST(LikelihoodCurve, CsvHeader) {
    const auto curve = likelihood_curve(BinaryDist(0.4), BinaryDist(0.5), 3, 1);
    std::ostringstream out;
    write_curve_csv(out, curve);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "N,log_likelihood");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(FitLine, ExactLine) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (const double v : x) y.push_back(3.0 - 0.5 * v);
    const LinearFit f = fit_line(x, y);
    EXPECT_NEAR(f.slope, -0.5, 1e-14);
    EXPECT_NEAR(f.intercept, 3.0, 1e-14);
    EXPECT_NEAR(f.slope_stderr, 0.0, 1e-14);
}
