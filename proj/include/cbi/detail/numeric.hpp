#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace cbi::detail {

/// Neumaier compensated summation.
class CompensatedSum
{
public:
    void add(double value) noexcept
    {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// x * log(y) with the convention 0 * log(0) = 0.
[[nodiscard]] inline double xlogy(double x, double y) noexcept
{
    if (x == 0.0) {
        return 0.0;
    }
    return x * std::log(y);
}

/// x * log1p(-p) with the convention 0 * log(0) = 0.
[[nodiscard]] inline double xlog1m(double x, double p) noexcept
{
    if (x == 0.0) {
        return 0.0;
    }
    return x * std::log1p(-p);
}

/// (1 - p)^t with 0^0 = 1.
[[nodiscard]] inline double survival_power(double p, double t) noexcept
{
    return std::exp(xlog1m(t, p));
}

[[nodiscard]] inline double log_sum_exp(std::span<const double> logs) noexcept
{
    double peak = kNegInf;
    for (double v : logs) {
        peak = std::max(peak, v);
    }
    if (peak == kNegInf) {
        return kNegInf;
    }
    CompensatedSum acc;
    for (double v : logs) {
        acc.add(std::exp(v - peak));
    }
    return peak + std::log(acc.value());
}

[[nodiscard]] inline bool is_probability(double v) noexcept
{
    return v >= 0.0 && v <= 1.0;
}

} // namespace cbi::detail
