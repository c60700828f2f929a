#pragma once

// Shared test helpers: seeded generators for randomized instances, reference
// formulas that do not touch library code, and safety-case fixtures.

#include "cbi/cbi.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cbi::test {

[[nodiscard]] inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

[[nodiscard]] inline double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::pow(10.0, uniform(rng, std::log10(lo), std::log10(hi)));
}

[[nodiscard]] inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi)
{
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

/// Posterior functional computed in long double straight from the definition.
template <typename G>
[[nodiscard]] long double reference_posterior(const std::vector<double>& support, const std::vector<double>& masses,
                                              std::uint64_t n, std::uint64_t k, G&& g)
{
    long double num = 0.0L;
    long double den = 0.0L;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const long double p = support[i];
        const long double fail = k == 0 ? 1.0L : std::pow(p, static_cast<long double>(k));
        const long double pass = n == k ? 1.0L : std::pow(1.0L - p, static_cast<long double>(n - k));
        const long double w = masses[i] * fail * pass;
        num += w * static_cast<long double>(g(support[i]));
        den += w;
    }
    return num / den;
}

/// Posterior mean of the two-point prior {0: 1 - m/x, x: m/x} after n
/// failure-free demands.
[[nodiscard]] inline double mean_bound_two_point(double m, double x, std::uint64_t n)
{
    const double s = std::pow(1.0 - x, static_cast<double>(n));
    return m * x * s / (x - m + m * s);
}

/// A random constraint that is satisfiable on its own. Thresholds are drawn
/// from a coarse grid's points so they stay meaningful on it.
[[nodiscard]] inline PartialPriorConstraint random_constraint(std::mt19937_64& rng, const std::vector<double>& points)
{
    auto interior = [&] {
        return points[1 + pick(rng, 0, points.size() - 3)];
    };
    switch (pick(rng, 0, 3)) {
    case 0:
        return MeanBound{interior()};
    case 1:
        return ConfidenceBound{interior(), uniform(rng, 0.05, 0.99)};
    case 2:
        return PerfectionConfidence{uniform(rng, 0.05, 0.95)};
    default:
        return PriorReliability{pick(rng, 1, 2000), uniform(rng, 0.05, 0.95)};
    }
}

[[nodiscard]] inline ObjectiveSpec random_objective(std::mt19937_64& rng, const std::vector<double>& points)
{
    switch (pick(rng, 0, 2)) {
    case 0:
        return PosteriorExpectedPfd{};
    case 1:
        return PosteriorConfidence{points[1 + pick(rng, 0, points.size() - 3)]};
    default:
        return FutureReliability{pick(rng, 1, 5000)};
    }
}

/// Coarse grid shared by oracle comparisons: the forced points plus a
/// geometric ladder, capped well under the oracle's size limit.
[[nodiscard]] inline PfdGrid coarse_grid(std::size_t resolution = 40)
{
    return build_grid({}, std::nullopt, resolution);
}

/// The argument shape of a DNN reliability case: a top goal in context,
/// decomposed into a quantitative reliability claim and an undeveloped
/// interpretability goal; the reliability claim rests on prior and
/// operational evidence plus a claim argued in another module.
[[nodiscard]] inline gsn::SafetyCase fig2_case(std::optional<gsn::QuantClaim> claim = std::nullopt)
{
    using gsn::NodeKind;
    gsn::SafetyCase sc;
    auto node = [&](std::string id, NodeKind kind, std::string statement) {
        gsn::GsnNode n;
        n.id = std::move(id);
        n.kind = kind;
        n.statement = std::move(statement);
        return n;
    };
    sc.add_node(node("G1", NodeKind::goal, "The DNN is acceptably safe in its operational context"));
    sc.add_node(node("C1", NodeKind::context, "Operational profile of the deployment"));
    sc.add_node(node("S1", NodeKind::strategy, "Argue over reliability and interpretability"));
    auto g2 = node("G2", NodeKind::goal, "Future reliability meets the requirement");
    g2.claim = std::move(claim);
    sc.add_node(std::move(g2));
    auto g3 = node("G3", NodeKind::goal, "Predictions are interpretable");
    g3.undeveloped = true;
    sc.add_node(std::move(g3));
    sc.add_node(node("S2", NodeKind::strategy, "Conservative Bayesian inference over prior and operational evidence"));
    sc.add_node(node("A1", NodeKind::assumption, "Demands are i.i.d. Bernoulli trials"));
    sc.add_node(node("J1", NodeKind::justification, "Worst-case prior consistent with partial knowledge"));
    sc.add_node(node("G4", NodeKind::goal, "Prior confidence bound from robustness verification"));
    sc.add_node(node("G5", NodeKind::goal, "Operational testing shows no failures"));
    sc.add_node(node("Sn1", NodeKind::solution, "Verification coverage report"));
    sc.add_node(node("Sn2", NodeKind::solution, "Operational demand log"));
    auto away = node("AG1", NodeKind::away_goal, "Verification tool is sound");
    away.module_ref = "VerificationModule";
    sc.add_node(std::move(away));

    sc.set_root("G1");
    sc.add_supported_by("G1", "S1");
    sc.add_supported_by("S1", "G2");
    sc.add_supported_by("S1", "G3");
    sc.add_supported_by("G2", "S2");
    sc.add_supported_by("S2", "G4");
    sc.add_supported_by("S2", "G5");
    sc.add_supported_by("S2", "AG1");
    sc.add_supported_by("G4", "Sn1");
    sc.add_supported_by("G5", "Sn2");
    sc.add_in_context_of("G1", "C1");
    sc.add_in_context_of("S2", "A1");
    sc.add_in_context_of("S2", "J1");
    return sc;
}

inline const std::set<std::string> kFig2Modules{"VerificationModule"};

} // namespace cbi::test
