#include "cbi/detail/numeric.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace cbi::detail;

TEST(CompensatedSum, RecoversCancelledLowOrderBits)
{
    CompensatedSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    EXPECT_EQ(s.value(), 2.0);
}

TEST(CompensatedSum, TenthsSumToOneExactly)
{
    CompensatedSum s;
    for (int i = 0; i < 10; ++i) {
        s.add(0.1);
    }
    EXPECT_EQ(s.value(), 1.0);
}

TEST(SurvivalPower, ZeroToTheZeroIsOne)
{
    EXPECT_EQ(survival_power(1.0, 0.0), 1.0);
    EXPECT_EQ(survival_power(0.0, 5.0), 1.0);
    EXPECT_EQ(survival_power(1.0, 3.0), 0.0);
}

TEST(SurvivalPower, MatchesPowAcrossRange)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> p(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double x = p(rng);
        const double t = static_cast<double>(rng() % 5000);
        EXPECT_NEAR(survival_power(x, t), std::pow(1.0 - x, t), 1e-13);
    }
}

TEST(LogSumExp, HandlesAllNegativeInfinity)
{
    const std::vector<double> v{kNegInf, kNegInf};
    EXPECT_EQ(log_sum_exp(v), kNegInf);
}

TEST(LogSumExp, StableForHugeMagnitudes)
{
    const std::vector<double> v{-1e6, -1e6 + std::log(3.0)};
    EXPECT_NEAR(log_sum_exp(v), -1e6 + std::log(4.0), 1e-9);
}

TEST(Xlogy, ZeroTimesLogZeroIsZero)
{
    EXPECT_EQ(xlogy(0.0, 0.0), 0.0);
    EXPECT_EQ(xlog1m(0.0, 1.0), 0.0);
    EXPECT_EQ(xlogy(2.0, 0.0), kNegInf);
}
