#pragma once

#include "cbi/detail/numeric.hpp"
#include "cbi/error.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <variant>

namespace cbi {

/// Operational evidence: k failures in n i.i.d. demands.
struct Observation
{
    std::uint64_t n = 0;
    std::uint64_t k = 0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

inline void validate(const Observation& obs)
{
    if (obs.k > obs.n) {
        throw InvalidInput("observation has more failures (" + std::to_string(obs.k) + ") than demands (" +
                           std::to_string(obs.n) + ")");
    }
}

/// E[pfd | evidence]
struct PosteriorExpectedPfd
{
};

/// Pr(pfd <= p_req | evidence)
struct PosteriorConfidence
{
    double p_req = 0.0;
};

/// E[(1 - pfd)^t | evidence]
struct FutureReliability
{
    std::uint64_t t = 0;
};

using ObjectiveSpec = std::variant<PosteriorExpectedPfd, PosteriorConfidence, FutureReliability>;

/// Which end of the range is the assessor's worst case.
enum class Direction { conservative_max, conservative_min };

[[nodiscard]] inline Direction direction(const ObjectiveSpec& objective)
{
    return std::holds_alternative<PosteriorExpectedPfd>(objective) ? Direction::conservative_max
                                                                   : Direction::conservative_min;
}

inline void validate(const ObjectiveSpec& objective)
{
    if (const auto* pc = std::get_if<PosteriorConfidence>(&objective)) {
        if (!std::isfinite(pc->p_req) || !detail::is_probability(pc->p_req)) {
            throw InvalidInput("p_req must lie in [0,1]");
        }
    }
}

/// The per-point functional g(p) whose posterior expectation is the objective.
[[nodiscard]] inline double objective_integrand(const ObjectiveSpec& objective, double p)
{
    return std::visit(
        [p](const auto& o) -> double {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, PosteriorExpectedPfd>) {
                return p;
            } else if constexpr (std::is_same_v<T, PosteriorConfidence>) {
                return p <= o.p_req ? 1.0 : 0.0;
            } else {
                return detail::survival_power(p, static_cast<double>(o.t));
            }
        },
        objective);
}

[[nodiscard]] inline std::string describe(const ObjectiveSpec& objective)
{
    return std::visit(
        [](const auto& o) -> std::string {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, PosteriorExpectedPfd>) {
                return "E[pfd | data]";
            } else if constexpr (std::is_same_v<T, PosteriorConfidence>) {
                return "Pr(pfd <= " + std::to_string(o.p_req) + " | data)";
            } else {
                return "E[(1-pfd)^" + std::to_string(o.t) + " | data]";
            }
        },
        objective);
}

} // namespace cbi
