#pragma once

// i.i.d. Bernoulli observation model and exact posterior functionals for a
// fully specified discrete prior.

#include "cbi/constraints.hpp"
#include "cbi/detail/numeric.hpp"
#include "cbi/error.hpp"
#include "cbi/objective.hpp"

#include <cmath>
#include <vector>

namespace cbi {

/// log(p^k (1-p)^(n-k)); -inf where the likelihood vanishes.
[[nodiscard]] inline double log_likelihood(double p, const Observation& obs) noexcept
{
    const double failures = static_cast<double>(obs.k);
    const double passes = static_cast<double>(obs.n - obs.k);
    return detail::xlogy(failures, p) + detail::xlog1m(passes, p);
}

/// p^k (1-p)^(n-k) with 0^0 = 1. The binomial coefficient is omitted since it
/// cancels in every posterior ratio.
[[nodiscard]] inline double likelihood(double p, const Observation& obs) noexcept
{
    if (obs.n <= 10000) {
        return std::pow(p, static_cast<double>(obs.k)) * std::pow(1.0 - p, static_cast<double>(obs.n - obs.k));
    }
    return std::exp(log_likelihood(p, obs));
}

struct PosteriorSummary
{
    double value = 0.0;
    /// log of sum_i mass_i * likelihood(p_i)
    double log_evidence = detail::kNegInf;
};

/// Posterior value together with its normalising evidence. Weights are formed
/// in log space so demand counts far beyond double underflow stay exact.
[[nodiscard]] inline PosteriorSummary posterior_summary(const PriorDistribution& prior, const Observation& obs,
                                                        const ObjectiveSpec& objective)
{
    validate(obs);
    validate(objective);
    const auto& support = prior.support();
    const auto& masses = prior.masses();
    std::vector<double> log_weights(support.size(), detail::kNegInf);
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (masses[i] > 0.0) {
            log_weights[i] = std::log(masses[i]) + log_likelihood(support[i], obs);
        }
    }
    const double log_evidence = detail::log_sum_exp(log_weights);
    if (log_evidence == detail::kNegInf) {
        throw ZeroEvidenceError("observation (n=" + std::to_string(obs.n) + ", k=" + std::to_string(obs.k) +
                                ") has zero likelihood under the prior");
    }
    detail::CompensatedSum numerator;
    detail::CompensatedSum denominator;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const double w = std::exp(log_weights[i] - log_evidence);
        numerator.add(w * objective_integrand(objective, support[i]));
        denominator.add(w);
    }
    return {numerator.value() / denominator.value(), log_evidence};
}

[[nodiscard]] inline double posterior_value(const PriorDistribution& prior, const Observation& obs,
                                            const ObjectiveSpec& objective)
{
    return posterior_summary(prior, obs, objective).value;
}

} // namespace cbi
