#pragma once

#include "cbi/constraints.hpp"
#include "cbi/grid.hpp"
#include "cbi/simplex.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbi {

struct FeasibilityReport
{
    bool feasible = false;
    /// On success, the admissible prior with the largest mean pfd.
    std::optional<PriorDistribution> witness;
    /// On failure, indices into the constraint list forming a minimal unsatisfiable subset.
    std::vector<std::size_t> unsatisfiable;

    [[nodiscard]] std::string message(std::span<const PartialPriorConstraint> constraints) const
    {
        if (feasible) {
            return "feasible";
        }
        std::string msg = "unsatisfiable constraints:";
        for (std::size_t i : unsatisfiable) {
            msg += " [" + std::to_string(i) + "] " + describe(constraints[i]) + ";";
        }
        if (unsatisfiable.empty()) {
            msg += " (grid admits no prior)";
        }
        return msg;
    }
};

namespace detail {

inline lp::RowType row_type(Relation rel)
{
    switch (rel) {
    case Relation::less_equal:
        return lp::RowType::less_equal;
    case Relation::greater_equal:
        return lp::RowType::greater_equal;
    case Relation::equal:
        break;
    }
    return lp::RowType::equal;
}

/// Constraint rows over prior masses restricted to `columns` of the grid, plus normalisation.
inline std::vector<lp::Row> mass_rows(std::span<const PartialPriorConstraint> constraints,
                                      std::span<const double> columns)
{
    std::vector<lp::Row> rows;
    rows.reserve(constraints.size() + 1);
    rows.push_back({std::vector<double>(columns.size(), 1.0), lp::RowType::equal, 1.0});
    for (const auto& c : constraints) {
        lp::Row row{std::vector<double>(columns.size()), row_type(relation(c)), rhs(c)};
        for (std::size_t i = 0; i < columns.size(); ++i) {
            row.coeffs[i] = coefficient(c, columns[i]);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::optional<PriorDistribution> prior_from_masses(std::span<const double> points, std::span<const double> x)
{
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (x[i] > 0.0) {
            pts.emplace_back(points[i], x[i]);
        }
    }
    if (pts.empty()) {
        return std::nullopt;
    }
    return PriorDistribution::from_points(pts);
}

/// Solves the mass LP for `objective` over the given columns.
inline std::optional<PriorDistribution> solve_mass_lp(std::span<const PartialPriorConstraint> constraints,
                                                      std::span<const double> columns,
                                                      std::vector<double> objective)
{
    lp::LinearProgram prog;
    prog.num_vars = columns.size();
    prog.objective = std::move(objective);
    prog.sense = lp::Sense::maximize;
    prog.rows = mass_rows(constraints, columns);
    const auto sol = lp::solve(prog);
    if (sol.status != lp::Status::optimal) {
        return std::nullopt;
    }
    auto prior = prior_from_masses(columns, sol.x);
    if (prior && !satisfies_all(*prior, constraints)) {
        return std::nullopt;
    }
    return prior;
}

inline std::optional<PriorDistribution> pessimistic_prior(std::span<const PartialPriorConstraint> constraints,
                                                          const PfdGrid& grid)
{
    return solve_mass_lp(constraints, grid.points(), grid.points());
}

} // namespace detail

/// Finds an admissible grid-supported prior or names a minimal set of
/// constraints that no grid-supported prior can meet jointly.
[[nodiscard]] inline FeasibilityReport check_feasible(std::span<const PartialPriorConstraint> constraints,
                                                      const PfdGrid& grid)
{
    for (const auto& c : constraints) {
        validate(c);
    }
    FeasibilityReport report;
    if (constraints.empty()) {
        report.feasible = true;
        report.witness = PriorDistribution::point_mass(1.0);
        return report;
    }
    if (auto w = detail::pessimistic_prior(constraints, grid)) {
        report.feasible = true;
        report.witness = std::move(w);
        return report;
    }
    // Deletion filter: drop every constraint whose removal keeps the rest infeasible.
    std::vector<std::size_t> keep(constraints.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        keep[i] = i;
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        std::vector<PartialPriorConstraint> trial;
        for (std::size_t j : keep) {
            if (j != i) {
                trial.push_back(constraints[j]);
            }
        }
        if (!trial.empty() && !detail::pessimistic_prior(trial, grid)) {
            std::erase(keep, i);
        }
    }
    report.unsatisfiable = std::move(keep);
    return report;
}

} // namespace cbi
