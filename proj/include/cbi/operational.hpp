#pragma once

// Operational evidence: demand logs, Bernoulli demand simulation, random
// admissible priors, and the empirical conservatism audit of the solver.
//
// Randomness is std::mt19937_64 throughout. Uniform doubles take the top 53
// bits of one draw, so every sequence is bit-reproducible across platforms.
// Per-trial generators are seeded with std::seed_seq over (seed, trial).

#include "cbi/constraints.hpp"
#include "cbi/error.hpp"
#include "cbi/feasibility.hpp"
#include "cbi/grid.hpp"
#include "cbi/inference.hpp"
#include "cbi/objective.hpp"
#include "cbi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cbi {

enum class Outcome { pass, fail };

struct DemandRecord
{
    std::int64_t index = 0;
    Outcome outcome = Outcome::pass;
};

class DemandLog
{
public:
    DemandLog() = default;

    explicit DemandLog(std::vector<DemandRecord> records) : records_(std::move(records))
    {
        for (std::size_t i = 1; i < records_.size(); ++i) {
            if (records_[i].index <= records_[i - 1].index) {
                throw InvalidInput("demand log indices must be strictly increasing (at record " +
                                   std::to_string(i + 1) + ")");
            }
        }
    }

    [[nodiscard]] const std::vector<DemandRecord>& records() const noexcept { return records_; }

private:
    std::vector<DemandRecord> records_;
};

[[nodiscard]] inline Observation ingest(const DemandLog& log)
{
    Observation obs;
    obs.n = log.records().size();
    obs.k = static_cast<std::uint64_t>(std::count_if(log.records().begin(), log.records().end(),
                                                     [](const DemandRecord& r) { return r.outcome == Outcome::fail; }));
    return obs;
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits of one draw.
[[nodiscard]] inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection.
[[nodiscard]] inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n)
{
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = rng();
    while (v >= limit) {
        v = rng();
    }
    return static_cast<std::size_t>(v % bound);
}

[[nodiscard]] inline std::mt19937_64 trial_generator(std::uint64_t seed, std::uint64_t trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

} // namespace detail

/// n i.i.d. demands, each failing with probability true_pfd. Indices run 1..n.
[[nodiscard]] inline DemandLog simulate_demands(double true_pfd, std::uint64_t n, std::uint64_t seed)
{
    if (!detail::is_probability(true_pfd)) {
        throw InvalidInput("true pfd must lie in [0,1]");
    }
    std::mt19937_64 rng(seed);
    std::vector<DemandRecord> records;
    records.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const bool fail = detail::uniform01(rng) < true_pfd;
        records.push_back({static_cast<std::int64_t>(i + 1), fail ? Outcome::fail : Outcome::pass});
    }
    return DemandLog(std::move(records));
}

inline constexpr std::size_t kSamplingAttempts = 500;

/// Random grid-supported prior satisfying every constraint. Each attempt
/// draws a random support (biased toward constraint thresholds and the grid
/// ends), finds 1-3 vertices of the admissible masses on it with random
/// linear objectives, and mixes them with random convex weights.
[[nodiscard]] inline PriorDistribution sample_feasible_prior(std::span<const PartialPriorConstraint> constraints,
                                                             const PfdGrid& grid, std::mt19937_64& rng)
{
    for (const auto& c : constraints) {
        validate(c);
    }
    const auto& pts = grid.points();
    std::vector<std::size_t> anchors{0, pts.size() - 1};
    for (double p : forced_grid_points(constraints, std::nullopt)) {
        anchors.push_back(grid.index_of_nearest(p));
    }
    for (const auto& c : constraints) {
        if (const auto* pr = std::get_if<PriorReliability>(&c); pr && pr->n0 > 0) {
            anchors.push_back(grid.index_of_nearest(1.0 / static_cast<double>(pr->n0)));
        }
    }
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

    for (std::size_t attempt = 0; attempt < kSamplingAttempts; ++attempt) {
        std::vector<std::size_t> support;
        for (std::size_t a : anchors) {
            if (detail::uniform01(rng) < 0.5) {
                support.push_back(a);
            }
        }
        const std::size_t extra = constraints.size() + 2 + detail::uniform_index(rng, 5);
        for (std::size_t i = 0; i < extra; ++i) {
            if (detail::uniform01(rng) < 0.5) {
                support.push_back(detail::uniform_index(rng, pts.size()));
            } else {
                const auto a = static_cast<std::ptrdiff_t>(anchors[detail::uniform_index(rng, anchors.size())]);
                const auto offset = static_cast<std::ptrdiff_t>(detail::uniform_index(rng, 33)) - 16;
                const auto j = std::clamp<std::ptrdiff_t>(a + offset, 0, static_cast<std::ptrdiff_t>(pts.size()) - 1);
                support.push_back(static_cast<std::size_t>(j));
            }
        }
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        std::vector<double> columns;
        for (std::size_t i : support) {
            columns.push_back(pts[i]);
        }

        const std::size_t vertices = 1 + detail::uniform_index(rng, 3);
        std::vector<std::pair<double, double>> mixture;
        bool ok = true;
        for (std::size_t v = 0; v < vertices && ok; ++v) {
            std::vector<double> obj(columns.size());
            for (double& o : obj) {
                o = 2.0 * detail::uniform01(rng) - 1.0;
            }
            auto vertex = detail::solve_mass_lp(constraints, columns, std::move(obj));
            if (!vertex) {
                ok = false;
                break;
            }
            const double w = vertices == 1 ? 1.0 : detail::uniform01(rng) + 1e-3;
            for (std::size_t i = 0; i < vertex->size(); ++i) {
                mixture.emplace_back(vertex->support()[i], w * vertex->masses()[i]);
            }
        }
        if (!ok) {
            continue;
        }
        auto prior = PriorDistribution::from_points(mixture);
        if (satisfies_all(prior, constraints)) {
            return prior;
        }
    }
    throw SamplingFailure("no admissible prior found after " + std::to_string(kSamplingAttempts) + " attempts");
}

[[nodiscard]] inline PriorDistribution sample_feasible_prior(std::span<const PartialPriorConstraint> constraints,
                                                             const PfdGrid& grid, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return sample_feasible_prior(constraints, grid, rng);
}

struct TrialRecord
{
    std::uint64_t trial = 0;
    /// Posterior value under the sampled prior; absent when the trial errored.
    std::optional<double> posterior;
    /// Conservative slack; negative means the sampled prior beat the bound.
    double margin = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

struct ConservatismReport
{
    std::uint64_t trials = 0;
    std::uint64_t violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    double bound = std::numeric_limits<double>::quiet_NaN();
    SolverStatus solver_status = SolverStatus::infeasible;
    std::vector<TrialRecord> records;
};

inline constexpr double kViolationTolerance = 1e-9;

struct AuditOptions
{
    std::size_t grid_resolution = kDefaultGridResolution;
    /// Mutation hook: shift the solver bound this far in the optimistic
    /// direction before comparing. Zero for a genuine audit.
    double anti_conservative_shift = 0.0;
};

/// Compares the solver bound against exact posteriors of randomly sampled
/// admissible priors. Sampling and zero-evidence failures are recorded per
/// trial and do not abort the audit.
[[nodiscard]] inline ConservatismReport check_conservatism(std::span<const PartialPriorConstraint> constraints,
                                                           const Observation& obs, const ObjectiveSpec& objective,
                                                           std::uint64_t trials, std::uint64_t seed,
                                                           const AuditOptions& options = {})
{
    const auto grid = build_grid(constraints, objective, options.grid_resolution);
    const auto solved = solve(constraints, obs, objective, grid, SolveOptions{false});
    if (solved.status == SolverStatus::infeasible) {
        throw InfeasibleConstraints("cannot audit an infeasible constraint set");
    }
    const Direction dir = direction(objective);
    const double bound = dir == Direction::conservative_max ? solved.bound - options.anti_conservative_shift
                                                            : solved.bound + options.anti_conservative_shift;

    ConservatismReport report;
    report.trials = trials;
    report.bound = bound;
    report.solver_status = solved.status;
    report.records.reserve(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
        TrialRecord rec;
        rec.trial = t;
        try {
            auto rng = detail::trial_generator(seed, t);
            const auto prior = sample_feasible_prior(constraints, grid, rng);
            const double value = posterior_value(prior, obs, objective);
            rec.posterior = value;
            rec.margin = dir == Direction::conservative_max ? bound - value : value - bound;
            report.worst_margin = std::min(report.worst_margin, rec.margin);
            if (rec.margin < -kViolationTolerance) {
                ++report.violations;
            }
        } catch (const Error& e) {
            rec.error = e.what();
        }
        report.records.push_back(std::move(rec));
    }
    return report;
}

} // namespace cbi
