#include "cbi/inference.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cbi;

TEST(Likelihood, SpecifiedValues)
{
    EXPECT_EQ(likelihood(0.0, {5, 0}), 1.0);
    EXPECT_EQ(likelihood(0.5, {2, 1}), 0.25);
    EXPECT_NEAR(likelihood(0.1, {10, 0}), 0.3486784401, 1e-15);
    EXPECT_EQ(likelihood(1.0, {3, 3}), 1.0);
    EXPECT_EQ(likelihood(0.0, {3, 1}), 0.0);
}

TEST(Likelihood, LogSpaceAgreesWithDirectProduct)
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 300; ++i) {
        const double p = test::uniform(rng, 0.0, 0.2);
        const std::uint64_t n = test::pick(rng, 0, 200);
        const std::uint64_t k = test::pick(rng, 0, std::min<std::uint64_t>(n, 5));
        long double direct = 1.0L;
        for (std::uint64_t j = 0; j < k; ++j) {
            direct *= p;
        }
        for (std::uint64_t j = k; j < n; ++j) {
            direct *= 1.0L - p;
        }
        EXPECT_NEAR(likelihood(p, {n, k}) / static_cast<double>(direct), 1.0, 1e-12);
    }
}

TEST(Likelihood, LargeCountsUseLogSpace)
{
    const Observation obs{1'000'000, 0};
    EXPECT_NEAR(log_likelihood(1e-4, obs), 1e6 * std::log1p(-1e-4), 1e-6);
    EXPECT_NEAR(likelihood(1e-4, obs), std::exp(1e6 * std::log1p(-1e-4)), 1e-50);
}

TEST(Posterior, PointMassGivesDegenerateValue)
{
    const auto prior = PriorDistribution::point_mass(1e-3);
    EXPECT_NEAR(posterior_value(prior, {500, 0}, FutureReliability{1000}), std::pow(1.0 - 1e-3, 1000.0), 1e-14);
}

TEST(Posterior, LikelihoodKillsMassAtOne)
{
    const PriorDistribution prior({0.0, 1.0}, {0.5, 0.5});
    EXPECT_EQ(posterior_value(prior, {1, 0}, PosteriorExpectedPfd{}), 0.0);
}

TEST(Posterior, ConfidenceRatio)
{
    const PriorDistribution prior({0.1, 0.5}, {0.9, 0.1});
    const double a = 0.9 * std::pow(0.9, 10);
    const double b = 0.1 * std::pow(0.5, 10);
    const double v = posterior_value(prior, {10, 0}, PosteriorConfidence{0.2});
    EXPECT_NEAR(v, a / (a + b), 1e-15);
    EXPECT_NEAR(v, 0.99969, 5e-6);
}

TEST(Posterior, ZeroEvidence)
{
    EXPECT_THROW((void)posterior_value(PriorDistribution::point_mass(0.0), {10, 1}, PosteriorExpectedPfd{}),
                 ZeroEvidenceError);
    EXPECT_THROW((void)posterior_value(PriorDistribution::point_mass(1.0), {10, 9}, PosteriorExpectedPfd{}),
                 ZeroEvidenceError);
}

TEST(Posterior, RejectsInvalidObservation)
{
    EXPECT_THROW((void)posterior_value(PriorDistribution::point_mass(0.5), {1, 2}, PosteriorExpectedPfd{}),
                 InvalidInput);
}

namespace {

PriorDistribution random_prior(std::mt19937_64& rng)
{
    std::vector<std::pair<double, double>> pts;
    const auto size = test::pick(rng, 1, 6);
    for (std::uint64_t i = 0; i < size; ++i) {
        const double p = test::pick(rng, 0, 3) == 0 ? test::uniform(rng, 0.0, 1.0) : test::log_uniform(rng, 1e-6, 1e-1);
        pts.emplace_back(p, test::uniform(rng, 0.01, 1.0));
    }
    return PriorDistribution::from_points(pts);
}

} // namespace

TEST(Posterior, MatchesLongDoubleReference)
{
    std::mt19937_64 rng(32);
    for (int i = 0; i < 500; ++i) {
        const auto prior = random_prior(rng);
        const std::uint64_t n = test::pick(rng, 0, 3000);
        const std::uint64_t k = test::pick(rng, 0, std::min<std::uint64_t>(n, 3));
        const double p_req = test::log_uniform(rng, 1e-5, 0.5);
        const std::uint64_t t = test::pick(rng, 0, 5000);
        const Observation obs{n, k};
        const auto& s = prior.support();
        const auto& m = prior.masses();
        try {
            const double mean = posterior_value(prior, obs, PosteriorExpectedPfd{});
            EXPECT_NEAR(mean, static_cast<double>(test::reference_posterior(s, m, n, k, [](double p) { return p; })),
                        1e-12);
            const double conf = posterior_value(prior, obs, PosteriorConfidence{p_req});
            EXPECT_NEAR(conf,
                        static_cast<double>(test::reference_posterior(
                            s, m, n, k, [&](double p) { return p <= p_req ? 1.0 : 0.0; })),
                        1e-12);
            const double rel = posterior_value(prior, obs, FutureReliability{t});
            EXPECT_NEAR(rel,
                        static_cast<double>(test::reference_posterior(
                            s, m, n, k, [&](double p) { return std::pow(1.0 - p, static_cast<double>(t)); })),
                        1e-12);
        } catch (const ZeroEvidenceError&) {
            EXPECT_EQ(test::reference_posterior(s, m, n, k, [](double) { return 1.0; }) * 0.0L, 0.0L);
        }
    }
}

TEST(Posterior, RangeProperties)
{
    std::mt19937_64 rng(33);
    for (int i = 0; i < 300; ++i) {
        const auto prior = random_prior(rng);
        const Observation obs{test::pick(rng, 0, 1000), 0};
        const double mean = posterior_value(prior, obs, PosteriorExpectedPfd{});
        EXPECT_GE(mean, prior.support().front() - 1e-15);
        EXPECT_LE(mean, prior.support().back() + 1e-15);
        const double conf = posterior_value(prior, obs, PosteriorConfidence{0.01});
        EXPECT_GE(conf, 0.0);
        EXPECT_LE(conf, 1.0);
        const double rel = posterior_value(prior, obs, FutureReliability{100});
        EXPECT_GE(rel, 0.0);
        EXPECT_LE(rel, 1.0);
    }
}

TEST(Posterior, EmptyObservationReturnsPriorFunctional)
{
    std::mt19937_64 rng(34);
    for (int i = 0; i < 200; ++i) {
        const auto prior = random_prior(rng);
        const double prior_mean = prior.expectation([](double p) { return p; });
        EXPECT_NEAR(posterior_value(prior, {0, 0}, PosteriorExpectedPfd{}), prior_mean, 1e-14);
    }
}

TEST(Posterior, InvariantUnderMassScaling)
{
    std::mt19937_64 rng(35);
    for (int i = 0; i < 200; ++i) {
        const auto prior = random_prior(rng);
        std::vector<std::pair<double, double>> scaled;
        const double c = test::log_uniform(rng, 1e-3, 1e3);
        for (std::size_t j = 0; j < prior.size(); ++j) {
            scaled.emplace_back(prior.support()[j], c * prior.masses()[j]);
        }
        const auto other = PriorDistribution::from_points(scaled);
        const Observation obs{test::pick(rng, 0, 500), 0};
        EXPECT_NEAR(posterior_value(prior, obs, FutureReliability{50}),
                    posterior_value(other, obs, FutureReliability{50}), 1e-13);
    }
}

TEST(Posterior, FailureFreeReliabilityNonDecreasingInN)
{
    std::mt19937_64 rng(36);
    for (int i = 0; i < 200; ++i) {
        const double a = test::log_uniform(rng, 1e-6, 1e-1);
        const double b = test::uniform(rng, a, 1.0);
        const double w = test::uniform(rng, 0.01, 0.99);
        const PriorDistribution prior({a, b}, {w, 1.0 - w});
        double prev = 0.0;
        for (std::uint64_t n : {0U, 1U, 10U, 100U, 1000U, 10000U, 100000U, 1000000U}) {
            const double v = posterior_value(prior, {n, 0}, FutureReliability{1000});
            EXPECT_GE(v, prev - 1e-15);
            prev = v;
        }
    }
}
