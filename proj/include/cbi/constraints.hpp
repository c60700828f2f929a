#pragma once

// Partial prior knowledge about the probability of failure on demand (pfd)
// and finitely supported priors it restricts.

#include "cbi/detail/numeric.hpp"
#include "cbi/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace cbi {

/// E[pfd] <= m
struct MeanBound
{
    double m = 0.0;
};

/// Pr(pfd <= epsilon) = theta. Mass located exactly at epsilon counts.
struct ConfidenceBound
{
    double epsilon = 0.0;
    double theta = 0.0;
};

/// Pr(pfd = 0) = theta
struct PerfectionConfidence
{
    double theta = 0.0;
};

/// E[(1 - pfd)^n0] >= gamma
struct PriorReliability
{
    std::uint64_t n0 = 0;
    double gamma = 0.0;
};

using PartialPriorConstraint = std::variant<MeanBound, ConfidenceBound, PerfectionConfidence, PriorReliability>;

enum class Relation { less_equal, greater_equal, equal };

inline void validate(const PartialPriorConstraint& c)
{
    auto require = [](double v, const char* what) {
        if (!std::isfinite(v) || !detail::is_probability(v)) {
            throw InvalidInput(std::string(what) + " must lie in [0,1]");
        }
    };
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, MeanBound>) {
                require(k.m, "mean bound m");
            } else if constexpr (std::is_same_v<T, ConfidenceBound>) {
                require(k.epsilon, "confidence bound epsilon");
                require(k.theta, "confidence bound theta");
            } else if constexpr (std::is_same_v<T, PerfectionConfidence>) {
                require(k.theta, "perfection confidence theta");
            } else {
                require(k.gamma, "prior reliability gamma");
            }
        },
        c);
}

/// Every constraint is linear in the prior masses: sum_i mass_i * coefficient(c, p_i) (rel) rhs(c).
[[nodiscard]] inline double coefficient(const PartialPriorConstraint& c, double p)
{
    return std::visit(
        [p](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, MeanBound>) {
                return p;
            } else if constexpr (std::is_same_v<T, ConfidenceBound>) {
                return p <= k.epsilon ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, PerfectionConfidence>) {
                return p == 0.0 ? 1.0 : 0.0;
            } else {
                return detail::survival_power(p, static_cast<double>(k.n0));
            }
        },
        c);
}

[[nodiscard]] inline Relation relation(const PartialPriorConstraint& c)
{
    return std::visit(
        [](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, MeanBound>) {
                return Relation::less_equal;
            } else if constexpr (std::is_same_v<T, PriorReliability>) {
                return Relation::greater_equal;
            } else {
                return Relation::equal;
            }
        },
        c);
}

[[nodiscard]] inline double rhs(const PartialPriorConstraint& c)
{
    return std::visit(
        [](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, MeanBound>) {
                return k.m;
            } else if constexpr (std::is_same_v<T, PriorReliability>) {
                return k.gamma;
            } else {
                return k.theta;
            }
        },
        c);
}

[[nodiscard]] inline std::string describe(const PartialPriorConstraint& c)
{
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, MeanBound>) {
                os << "E[pfd] <= " << k.m;
            } else if constexpr (std::is_same_v<T, ConfidenceBound>) {
                os << "Pr(pfd <= " << k.epsilon << ") = " << k.theta;
            } else if constexpr (std::is_same_v<T, PerfectionConfidence>) {
                os << "Pr(pfd = 0) = " << k.theta;
            } else {
                os << "E[(1-pfd)^" << k.n0 << "] >= " << k.gamma;
            }
        },
        c);
    return os.str();
}

/// Finitely supported distribution over pfd values.
class PriorDistribution
{
public:
    PriorDistribution() = default;

    /// `support` strictly increasing in [0,1]; masses non-negative summing to 1.
    PriorDistribution(std::vector<double> support, std::vector<double> masses)
        : support_(std::move(support)), masses_(std::move(masses))
    {
        if (support_.empty() || support_.size() != masses_.size()) {
            throw InvalidInput("prior support and masses must be non-empty and of equal length");
        }
        detail::CompensatedSum total;
        for (std::size_t i = 0; i < support_.size(); ++i) {
            if (!detail::is_probability(support_[i])) {
                throw InvalidInput("prior support point outside [0,1]");
            }
            if (i > 0 && !(support_[i - 1] < support_[i])) {
                throw InvalidInput("prior support must be strictly increasing");
            }
            if (!(masses_[i] >= 0.0) || !std::isfinite(masses_[i])) {
                throw InvalidInput("prior masses must be non-negative");
            }
            total.add(masses_[i]);
        }
        if (std::abs(total.value() - 1.0) > 1e-9) {
            throw InvalidInput("prior masses sum to " + std::to_string(total.value()) + ", expected 1");
        }
    }

    [[nodiscard]] static PriorDistribution point_mass(double p) { return PriorDistribution({p}, {1.0}); }

    /// Accepts unsorted points with repeats; merges, drops zero masses and renormalizes.
    [[nodiscard]] static PriorDistribution from_points(std::span<const std::pair<double, double>> points)
    {
        std::map<double, double> merged;
        double total = 0.0;
        for (const auto& [p, w] : points) {
            if (w < 0.0) {
                throw InvalidInput("prior masses must be non-negative");
            }
            if (w > 0.0) {
                merged[p] += w;
                total += w;
            }
        }
        if (!(total > 0.0)) {
            throw InvalidInput("prior has no positive mass");
        }
        std::vector<double> s;
        std::vector<double> m;
        for (const auto& [p, w] : merged) {
            s.push_back(p);
            m.push_back(w / total);
        }
        return PriorDistribution(std::move(s), std::move(m));
    }

    [[nodiscard]] const std::vector<double>& support() const noexcept { return support_; }
    [[nodiscard]] const std::vector<double>& masses() const noexcept { return masses_; }
    [[nodiscard]] std::size_t size() const noexcept { return support_.size(); }

    template <typename F>
    [[nodiscard]] double expectation(F&& f) const
    {
        detail::CompensatedSum acc;
        for (std::size_t i = 0; i < support_.size(); ++i) {
            acc.add(masses_[i] * f(support_[i]));
        }
        return acc.value();
    }

private:
    std::vector<double> support_;
    std::vector<double> masses_;
};

/// E_prior[coefficient(c, pfd)], the quantity the constraint bounds.
[[nodiscard]] inline double constraint_value(const PriorDistribution& prior, const PartialPriorConstraint& c)
{
    return prior.expectation([&](double p) { return coefficient(c, p); });
}

[[nodiscard]] inline bool satisfies(const PriorDistribution& prior, const PartialPriorConstraint& c,
                                    double tolerance = 1e-9)
{
    const double v = constraint_value(prior, c);
    switch (relation(c)) {
    case Relation::less_equal:
        return v <= rhs(c) + tolerance;
    case Relation::greater_equal:
        return v >= rhs(c) - tolerance;
    case Relation::equal:
        return std::abs(v - rhs(c)) <= tolerance;
    }
    return false;
}

[[nodiscard]] inline bool satisfies_all(const PriorDistribution& prior,
                                        std::span<const PartialPriorConstraint> constraints,
                                        double tolerance = 1e-9)
{
    return std::all_of(constraints.begin(), constraints.end(),
                       [&](const auto& c) { return satisfies(prior, c, tolerance); });
}

} // namespace cbi
