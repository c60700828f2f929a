#pragma once

// Discretisation of the pfd axis on which worst-case priors are searched.

#include "cbi/constraints.hpp"
#include "cbi/error.hpp"
#include "cbi/objective.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace cbi {

inline constexpr std::size_t kDefaultGridResolution = 2000;
/// Relative gap of the point placed just above an equality threshold.
inline constexpr double kBoundaryGap = 1e-12;
inline constexpr double kGridLogFloor = 1e-10;
inline constexpr double kGridLogCeiling = 1e-2;

class PfdGrid
{
public:
    /// Strictly increasing points in [0,1] that include both 0 and 1.
    explicit PfdGrid(std::vector<double> points) : points_(std::move(points))
    {
        if (points_.size() < 2 || points_.front() != 0.0 || points_.back() != 1.0) {
            throw InvalidInput("grid must contain 0 and 1");
        }
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i - 1] < points_[i])) {
                throw InvalidInput("grid points must be strictly increasing");
            }
        }
    }

    /// Sorts, deduplicates, clips to [0,1] and adds the endpoints.
    [[nodiscard]] static PfdGrid from_points(std::vector<double> points)
    {
        points.push_back(0.0);
        points.push_back(1.0);
        std::erase_if(points, [](double p) { return !(p >= 0.0 && p <= 1.0); });
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        return PfdGrid(std::move(points));
    }

    [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }

    [[nodiscard]] bool contains(double p) const
    {
        return std::binary_search(points_.begin(), points_.end(), p);
    }

    [[nodiscard]] std::size_t index_of_nearest(double p) const
    {
        auto it = std::lower_bound(points_.begin(), points_.end(), p);
        if (it == points_.end()) {
            return points_.size() - 1;
        }
        const auto i = static_cast<std::size_t>(it - points_.begin());
        if (i > 0 && std::abs(points_[i - 1] - p) < std::abs(*it - p)) {
            return i - 1;
        }
        return i;
    }

private:
    std::vector<double> points_;
};

/// Points that a grid must contain for the given constraints and objective:
/// every threshold, plus the point just above each equality threshold.
[[nodiscard]] inline std::vector<double> forced_grid_points(std::span<const PartialPriorConstraint> constraints,
                                                            const std::optional<ObjectiveSpec>& objective)
{
    std::vector<double> forced{0.0, 1.0};
    auto above = [&](double e) {
        if (e > 0.0 && e < 1.0) {
            forced.push_back(std::min(1.0, e * (1.0 + kBoundaryGap)));
        }
    };
    for (const auto& c : constraints) {
        if (const auto* cb = std::get_if<ConfidenceBound>(&c)) {
            forced.push_back(cb->epsilon);
            above(cb->epsilon);
        } else if (const auto* mb = std::get_if<MeanBound>(&c)) {
            forced.push_back(mb->m);
        }
    }
    if (objective) {
        if (const auto* pc = std::get_if<PosteriorConfidence>(&*objective)) {
            forced.push_back(pc->p_req);
            above(pc->p_req);
        }
    }
    return forced;
}

/// Base spacing: resolution-1 equal steps of an index map that is 0 at the
/// origin, log-spaced over [1e-10, 1e-2] on the first half and linear over
/// [1e-2, 1] on the second. Doubling the number of steps yields a superset.
[[nodiscard]] inline std::vector<double> base_grid_points(std::size_t resolution)
{
    if (resolution < 2) {
        throw InvalidInput("grid resolution must be at least 2");
    }
    const double log_lo = std::log10(kGridLogFloor);
    const double log_hi = std::log10(kGridLogCeiling);
    const std::size_t steps = resolution - 1;
    std::vector<double> pts;
    pts.reserve(resolution);
    for (std::size_t i = 0; i <= steps; ++i) {
        if (i == 0) {
            pts.push_back(0.0);
            continue;
        }
        if (i == steps) {
            pts.push_back(1.0);
            continue;
        }
        const double u = static_cast<double>(i) / static_cast<double>(steps);
        if (2 * i <= steps) {
            pts.push_back(std::pow(10.0, log_lo + (log_hi - log_lo) * (2.0 * u)));
        } else {
            pts.push_back(kGridLogCeiling + (1.0 - kGridLogCeiling) * (2.0 * u - 1.0));
        }
    }
    return pts;
}

[[nodiscard]] inline PfdGrid build_grid(std::span<const PartialPriorConstraint> constraints,
                                        const std::optional<ObjectiveSpec>& objective,
                                        std::size_t resolution = kDefaultGridResolution)
{
    for (const auto& c : constraints) {
        validate(c);
    }
    if (objective) {
        validate(*objective);
    }
    auto pts = base_grid_points(resolution);
    auto forced = forced_grid_points(constraints, objective);
    pts.insert(pts.end(), forced.begin(), forced.end());
    return PfdGrid::from_points(std::move(pts));
}

} // namespace cbi
