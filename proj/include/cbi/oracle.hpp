#pragma once

// Exhaustive reference for the worst-case prior search. Enumerates every
// grid support of bounded size and, for each, every choice of tight
// constraints that pins the masses to a unique vertex. The optimum of a
// linear-fractional objective over a polytope sits at a vertex, so the best
// vertex found is the grid optimum. Shares no code with the LP path.

#include "cbi/constraints.hpp"
#include "cbi/error.hpp"
#include "cbi/grid.hpp"
#include "cbi/inference.hpp"
#include "cbi/objective.hpp"
#include "cbi/solver.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace cbi {

inline constexpr std::size_t kOracleMaxGrid = 200;
inline constexpr double kOracleMaxCombinations = 1e8;

namespace detail {

[[nodiscard]] inline double binomial(std::size_t n, std::size_t r)
{
    if (r > n) {
        return 0.0;
    }
    double c = 1.0;
    for (std::size_t i = 1; i <= r; ++i) {
        c = c * static_cast<double>(n - r + i) / static_cast<double>(i);
    }
    return c;
}

/// Solves the (rows x cols) system M x = b by Gaussian elimination with
/// partial pivoting. Returns nullopt unless the solution is unique and the
/// system consistent.
[[nodiscard]] inline std::optional<std::vector<double>> solve_unique(std::vector<std::vector<double>> m,
                                                                     std::vector<double> b)
{
    const std::size_t rows = m.size();
    const std::size_t cols = rows == 0 ? 0 : m[0].size();
    if (rows < cols) {
        return std::nullopt;
    }
    constexpr double kSingular = 1e-12;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols; ++c, ++r) {
        std::size_t piv = r;
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (std::abs(m[i][c]) > std::abs(m[piv][c])) {
                piv = i;
            }
        }
        if (std::abs(m[piv][c]) < kSingular) {
            return std::nullopt;
        }
        std::swap(m[piv], m[r]);
        std::swap(b[piv], b[r]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) {
                continue;
            }
            const double f = m[i][c] / m[r][c];
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = c; j < cols; ++j) {
                m[i][j] -= f * m[r][j];
            }
            b[i] -= f * b[r];
        }
    }
    for (std::size_t i = cols; i < rows; ++i) {
        if (std::abs(b[i]) > 1e-10) {
            return std::nullopt;
        }
    }
    std::vector<double> x(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        x[c] = b[c] / m[c][c];
    }
    return x;
}

template <typename F>
void for_each_combination(std::size_t n, std::size_t r, F&& visit)
{
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) {
        idx[i] = i;
    }
    while (true) {
        visit(std::span<const std::size_t>(idx));
        std::size_t i = r;
        while (i > 0 && idx[i - 1] == n - r + i - 1) {
            --i;
        }
        if (i == 0) {
            return;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < r; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

} // namespace detail

/// Brute-force counterpart of solve() on a coarse grid (at most 200 points).
/// Support size is capped at (number of constraints + 2).
[[nodiscard]] inline CbiResult oracle_solve(std::span<const PartialPriorConstraint> constraints,
                                            const Observation& obs, const ObjectiveSpec& objective,
                                            const PfdGrid& coarse_grid)
{
    validate(obs);
    validate(objective);
    for (const auto& c : constraints) {
        validate(c);
    }
    const std::size_t g = coarse_grid.size();
    if (g > kOracleMaxGrid) {
        throw InvalidInput("oracle grid exceeds " + std::to_string(kOracleMaxGrid) + " points");
    }
    const std::size_t cap = constraints.size() + 2;
    if (detail::binomial(g, cap) > kOracleMaxCombinations) {
        throw CombinatorialLimit("C(" + std::to_string(g) + ", " + std::to_string(cap) + ") exceeds 1e8");
    }

    std::vector<std::size_t> equalities;
    std::vector<std::size_t> inequalities;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        (relation(constraints[i]) == Relation::equal ? equalities : inequalities).push_back(i);
    }
    const auto& pts = coarse_grid.points();
    std::vector<std::vector<double>> coeff(constraints.size(), std::vector<double>(g));
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        for (std::size_t i = 0; i < g; ++i) {
            coeff[c][i] = coefficient(constraints[c], pts[i]);
        }
    }

    const Direction dir = direction(objective);
    CbiResult result;
    result.objective = objective;
    result.observation = obs;
    result.grid_resolution = g;
    bool any_vertex = false;

    // A vertex has at most (1 + #constraints) non-zero masses.
    const std::size_t max_support = std::min({cap, g, constraints.size() + 1});
    for (std::size_t r = 1; r <= max_support; ++r) {
        detail::for_each_combination(g, r, [&](std::span<const std::size_t> support) {
            const std::size_t subsets = std::size_t{1} << inequalities.size();
            for (std::size_t mask = 0; mask < subsets; ++mask) {
                std::vector<std::size_t> tight = equalities;
                for (std::size_t b = 0; b < inequalities.size(); ++b) {
                    if (mask & (std::size_t{1} << b)) {
                        tight.push_back(inequalities[b]);
                    }
                }
                if (tight.size() + 1 < r) {
                    continue;
                }
                std::vector<std::vector<double>> m;
                std::vector<double> rhs_vec;
                m.emplace_back(r, 1.0);
                rhs_vec.push_back(1.0);
                for (std::size_t c : tight) {
                    std::vector<double> row(r);
                    for (std::size_t j = 0; j < r; ++j) {
                        row[j] = coeff[c][support[j]];
                    }
                    m.push_back(std::move(row));
                    rhs_vec.push_back(rhs(constraints[c]));
                }
                auto x = detail::solve_unique(std::move(m), std::move(rhs_vec));
                if (!x) {
                    continue;
                }
                bool ok = true;
                for (double& v : *x) {
                    if (v < -1e-12) {
                        ok = false;
                    }
                    v = std::max(0.0, v);
                }
                if (!ok) {
                    continue;
                }
                std::vector<std::pair<double, double>> prior_pts;
                for (std::size_t j = 0; j < r; ++j) {
                    prior_pts.emplace_back(pts[support[j]], (*x)[j]);
                }
                std::optional<PriorDistribution> prior;
                try {
                    prior = PriorDistribution::from_points(prior_pts);
                } catch (const InvalidInput&) {
                    continue;
                }
                if (!satisfies_all(*prior, constraints, 1e-10)) {
                    continue;
                }
                any_vertex = true;
                double value = 0.0;
                try {
                    value = posterior_value(*prior, obs, objective);
                } catch (const ZeroEvidenceError&) {
                    continue;
                }
                if (!result.witness || more_conservative(dir, value, result.bound)) {
                    result.bound = value;
                    result.witness = std::move(prior);
                }
            }
        });
    }

    if (!any_vertex) {
        result.status = SolverStatus::infeasible;
        return result;
    }
    if (!result.witness) {
        throw ZeroEvidenceError("observation has zero likelihood under every admissible prior");
    }
    result.status = SolverStatus::optimal;
    return result;
}

} // namespace cbi
