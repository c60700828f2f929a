#pragma once

// Dense two-phase tableau simplex for small row counts and a few thousand
// columns. Rows are equilibrated before solving; entering columns follow the
// most-negative reduced cost with lowest-index ties, and switch to Bland's
// rule after a run of degenerate pivots.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace cbi::lp {

enum class RowType { less_equal, greater_equal, equal };
enum class Sense { maximize, minimize };
enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Row
{
    std::vector<double> coeffs;
    RowType type = RowType::less_equal;
    double rhs = 0.0;
};

/// optimise objective . x subject to rows, x >= 0
struct LinearProgram
{
    std::size_t num_vars = 0;
    std::vector<double> objective;
    Sense sense = Sense::maximize;
    std::vector<Row> rows;
};

struct Solution
{
    Status status = Status::infeasible;
    double value = 0.0;
    std::vector<double> x;
};

struct Options
{
    double pivot_tolerance = 1e-11;
    double cost_tolerance = 1e-12;
    double feasibility_tolerance = 1e-9;
    std::size_t degenerate_switch = 50;
};

namespace detail {

class Tableau
{
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    [[nodiscard]] double rhs(std::size_t r) const { return at(r, cols_); }
    /// Objective row index; holds reduced costs (negative means improving).
    [[nodiscard]] std::size_t cost_row() const { return rows_; }

    void pivot(std::size_t pr, std::size_t pc)
    {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) {
            at(pr, c) *= inv;
        }
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) {
                continue;
            }
            const double f = at(r, pc);
            if (f == 0.0) {
                continue;
            }
            double* dst = &at(r, 0);
            const double* src = &at(pr, 0);
            for (std::size_t c = 0; c <= cols_; ++c) {
                dst[c] -= f * src[c];
            }
            dst[pc] = 0.0;
        }
    }

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

struct Engine
{
    Tableau t;
    std::vector<std::size_t> basis;
    std::vector<bool> barred;
    Options opt;

    /// Returns false when unbounded; iteration limit reported through `limited`.
    bool run(bool& limited)
    {
        const std::size_t m = t.rows();
        const std::size_t n = t.cols();
        const std::size_t limit = 200 * (m + n) + 1000;
        std::size_t degenerate = 0;
        limited = false;
        for (std::size_t iter = 0; iter < limit; ++iter) {
            const bool bland = degenerate >= opt.degenerate_switch;
            std::size_t enter = n;
            double best = -opt.cost_tolerance;
            for (std::size_t c = 0; c < n; ++c) {
                if (barred[c]) {
                    continue;
                }
                const double rc = t.at(t.cost_row(), c);
                if (rc < best) {
                    enter = c;
                    if (bland) {
                        break;
                    }
                    best = rc;
                }
            }
            if (enter == n) {
                return true;
            }
            std::size_t leave = m;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m; ++r) {
                const double a = t.at(r, enter);
                if (a <= opt.pivot_tolerance) {
                    continue;
                }
                const double ratio = std::max(0.0, t.rhs(r)) / a;
                if (ratio < best_ratio - 1e-15 ||
                    (ratio <= best_ratio + 1e-15 && leave < m && basis[r] < basis[leave])) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave == m) {
                return false;
            }
            degenerate = best_ratio == 0.0 ? degenerate + 1 : 0;
            t.pivot(leave, enter);
            basis[leave] = enter;
        }
        limited = true;
        return true;
    }
};

} // namespace detail

[[nodiscard]] inline Solution solve(const LinearProgram& lp, const Options& opt = {})
{
    const std::size_t n = lp.num_vars;
    const std::size_t m = lp.rows.size();

    // Equilibrate rows and make right-hand sides non-negative.
    std::vector<Row> rows = lp.rows;
    for (auto& row : rows) {
        double scale = std::abs(row.rhs);
        for (double v : row.coeffs) {
            scale = std::max(scale, std::abs(v));
        }
        if (scale > 0.0) {
            for (double& v : row.coeffs) {
                v /= scale;
            }
            row.rhs /= scale;
        }
        if (row.rhs < 0.0) {
            for (double& v : row.coeffs) {
                v = -v;
            }
            row.rhs = -row.rhs;
            if (row.type == RowType::less_equal) {
                row.type = RowType::greater_equal;
            } else if (row.type == RowType::greater_equal) {
                row.type = RowType::less_equal;
            }
        }
    }

    std::size_t slack_count = 0;
    std::size_t artificial_count = 0;
    for (const auto& row : rows) {
        if (row.type != RowType::equal) {
            ++slack_count;
        }
        if (row.type != RowType::less_equal) {
            ++artificial_count;
        }
    }
    const std::size_t cols = n + slack_count + artificial_count;
    detail::Engine e{detail::Tableau(m, cols), std::vector<std::size_t>(m), std::vector<bool>(cols, false), opt};
    std::vector<bool> artificial(cols, false);

    std::size_t next_slack = n;
    std::size_t next_art = n + slack_count;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& row = rows[r];
        for (std::size_t c = 0; c < n && c < row.coeffs.size(); ++c) {
            e.t.at(r, c) = row.coeffs[c];
        }
        e.t.rhs(r) = row.rhs;
        if (row.type == RowType::less_equal) {
            e.t.at(r, next_slack) = 1.0;
            e.basis[r] = next_slack++;
        } else {
            if (row.type == RowType::greater_equal) {
                e.t.at(r, next_slack++) = -1.0;
            }
            e.t.at(r, next_art) = 1.0;
            artificial[next_art] = true;
            e.basis[r] = next_art++;
        }
    }

    Solution out;
    bool limited = false;

    // Phase 1: maximise -sum(artificials); cost row = -(sum of artificial rows).
    if (artificial_count > 0) {
        const std::size_t z = e.t.cost_row();
        for (std::size_t r = 0; r < m; ++r) {
            if (!artificial[e.basis[r]]) {
                continue;
            }
            for (std::size_t c = 0; c <= cols; ++c) {
                if (c == cols || !artificial[c]) {
                    e.t.at(z, c) -= e.t.at(r, c);
                }
            }
        }
        e.run(limited);
        if (limited) {
            out.status = Status::iteration_limit;
            return out;
        }
        if (-e.t.rhs(z) > opt.feasibility_tolerance) {
            out.status = Status::infeasible;
            return out;
        }
        // Drive zero-valued artificials out of the basis where possible.
        for (std::size_t r = 0; r < m; ++r) {
            if (!artificial[e.basis[r]]) {
                continue;
            }
            std::size_t best = cols;
            double best_abs = opt.pivot_tolerance;
            for (std::size_t c = 0; c < n + slack_count; ++c) {
                if (std::abs(e.t.at(r, c)) > best_abs) {
                    best_abs = std::abs(e.t.at(r, c));
                    best = c;
                }
            }
            if (best != cols) {
                e.t.pivot(r, best);
                e.basis[r] = best;
            }
        }
        for (std::size_t c = 0; c < cols; ++c) {
            e.barred[c] = artificial[c];
        }
    }

    // Phase 2 cost row: reduced costs of -objective (maximisation form).
    const double sign = lp.sense == Sense::maximize ? 1.0 : -1.0;
    const std::size_t z = e.t.cost_row();
    for (std::size_t c = 0; c <= cols; ++c) {
        e.t.at(z, c) = 0.0;
    }
    for (std::size_t c = 0; c < n; ++c) {
        e.t.at(z, c) = -sign * lp.objective[c];
    }
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t b = e.basis[r];
        const double cb = b < n ? sign * lp.objective[b] : 0.0;
        if (cb == 0.0) {
            continue;
        }
        for (std::size_t c = 0; c <= cols; ++c) {
            e.t.at(z, c) += cb * e.t.at(r, c);
        }
    }
    for (std::size_t r = 0; r < m; ++r) {
        e.t.at(z, e.basis[r]) = 0.0;
    }

    if (!e.run(limited)) {
        out.status = Status::unbounded;
        return out;
    }
    if (limited) {
        out.status = Status::iteration_limit;
        return out;
    }
    out.status = Status::optimal;
    out.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        if (e.basis[r] < n) {
            out.x[e.basis[r]] = std::max(0.0, e.t.rhs(r));
        }
    }
    double value = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        value += lp.objective[c] * out.x[c];
    }
    out.value = value;
    return out;
}

} // namespace cbi::lp
