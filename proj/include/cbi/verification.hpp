#pragma once

// Turns robustness-verification coverage into a prior confidence bound
// Pr(pfd <= epsilon) = theta, where epsilon is the operational-profile mass
// left uncovered by verified regions and theta is the assessor's trust in
// the verification.

#include "cbi/constraints.hpp"
#include "cbi/detail/numeric.hpp"
#include "cbi/error.hpp"
#include "cbi/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace cbi {

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;
};

/// Unions overlapping or touching intervals; output sorted by `lo`.
[[nodiscard]] inline std::vector<Interval> merge_intervals(std::vector<Interval> intervals)
{
    std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::vector<Interval> merged;
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

/// Piece of a piecewise-constant density: `mass` spread uniformly over [lo, hi].
struct DensitySegment
{
    double lo = 0.0;
    double hi = 0.0;
    double mass = 0.0;
};

/// One-dimensional operational profile with piecewise-constant density.
class IntervalProfile
{
public:
    explicit IntervalProfile(std::vector<DensitySegment> segments) : segments_(std::move(segments))
    {
        if (segments_.empty()) {
            throw InvalidCoverage("interval profile needs at least one segment");
        }
        std::sort(segments_.begin(), segments_.end(),
                  [](const DensitySegment& a, const DensitySegment& b) { return a.lo < b.lo; });
        detail::CompensatedSum total;
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            const auto& s = segments_[i];
            if (!(s.lo < s.hi) || !std::isfinite(s.lo) || !std::isfinite(s.hi)) {
                throw InvalidCoverage("profile segment must satisfy lo < hi");
            }
            if (!(s.mass >= 0.0)) {
                throw InvalidCoverage("profile segment mass must be non-negative");
            }
            if (i > 0 && s.lo < segments_[i - 1].hi) {
                throw InvalidCoverage("profile segments overlap");
            }
            total.add(s.mass);
        }
        if (std::abs(total.value() - 1.0) > kWeightSumTolerance) {
            throw InvalidCoverage("profile segment masses sum to " + std::to_string(total.value()));
        }
    }

    [[nodiscard]] static IntervalProfile uniform(double lo = 0.0, double hi = 1.0)
    {
        return IntervalProfile({{lo, hi, 1.0}});
    }

    [[nodiscard]] double domain_lo() const { return segments_.front().lo; }
    [[nodiscard]] double domain_hi() const { return segments_.back().hi; }
    [[nodiscard]] const std::vector<DensitySegment>& segments() const noexcept { return segments_; }

    /// Profile mass of [lo, hi].
    [[nodiscard]] double mass_of(const Interval& iv) const
    {
        detail::CompensatedSum acc;
        for (const auto& s : segments_) {
            const double a = std::max(s.lo, iv.lo);
            const double b = std::min(s.hi, iv.hi);
            if (b > a) {
                acc.add(s.mass * (b - a) / (s.hi - s.lo));
            }
        }
        return acc.value();
    }

private:
    std::vector<DensitySegment> segments_;
};

struct IntervalCoverage
{
    std::vector<Interval> covered;
    IntervalProfile profile = IntervalProfile::uniform();
};

struct CoverageCell
{
    std::string point_id;
    bool covered = false;
};

struct DiscreteCoverage
{
    std::vector<CoverageCell> cells;
    OperationalProfile profile;
};

using VerifiedCoverage = std::variant<IntervalCoverage, DiscreteCoverage>;

/// Assessor-discounted bound Pr(G <= epsilon) = theta.
struct TrustedBound
{
    double epsilon = 0.0;
    double theta = 0.0;
};

[[nodiscard]] inline double coverage_bound(const IntervalCoverage& cov)
{
    const double lo = cov.profile.domain_lo();
    const double hi = cov.profile.domain_hi();
    for (const auto& iv : cov.covered) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
            throw InvalidCoverage("covered interval must satisfy lo <= hi");
        }
        if (iv.lo < lo || iv.hi > hi) {
            throw InvalidCoverage("covered interval lies outside the profile domain");
        }
    }
    detail::CompensatedSum covered;
    for (const auto& iv : merge_intervals(cov.covered)) {
        covered.add(cov.profile.mass_of(iv));
    }
    return std::clamp(1.0 - covered.value(), 0.0, 1.0);
}

[[nodiscard]] inline double coverage_bound(const DiscreteCoverage& cov)
{
    std::unordered_map<std::string, double> weight;
    for (const auto& e : cov.profile.entries()) {
        weight.emplace(e.point_id, e.weight);
    }
    std::unordered_map<std::string, bool> seen;
    detail::CompensatedSum uncovered;
    for (const auto& cell : cov.cells) {
        const auto it = weight.find(cell.point_id);
        if (it == weight.end()) {
            throw InvalidCoverage("coverage cell '" + cell.point_id + "' is not in the profile");
        }
        if (!seen.emplace(cell.point_id, cell.covered).second) {
            throw InvalidCoverage("coverage cell '" + cell.point_id + "' listed twice");
        }
        if (!cell.covered) {
            uncovered.add(it->second);
        }
    }
    if (seen.size() != weight.size()) {
        throw InvalidCoverage("coverage cells do not partition the profile");
    }
    return std::clamp(uncovered.value(), 0.0, 1.0);
}

/// Profile mass not covered by any verified region.
[[nodiscard]] inline double coverage_bound(const VerifiedCoverage& cov)
{
    return std::visit([](const auto& c) { return coverage_bound(c); }, cov);
}

[[nodiscard]] inline PartialPriorConstraint prior_from_verification(double epsilon, double theta)
{
    PartialPriorConstraint c = ConfidenceBound{epsilon, theta};
    validate(c);
    return c;
}

[[nodiscard]] inline PartialPriorConstraint prior_from_verification(const TrustedBound& b)
{
    return prior_from_verification(b.epsilon, b.theta);
}

} // namespace cbi
