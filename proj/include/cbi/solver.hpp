#pragma once

// Worst-case prior search. For a fixed grid the posterior objective is
// linear-fractional in the prior masses; substituting y = mass / evidence
// turns it into a linear program
//
//     optimise  sum_i y_i L_i g(p_i)
//     s.t.      sum_i y_i L_i = 1
//               sum_i y_i (a_c(p_i) - b_c)  (rel_c)  0     for each constraint c
//               y >= 0
//
// whose basic solutions carry at most (rows) non-zero masses. Likelihoods are
// expressed relative to a reference evidence level. One reference level only
// resolves a band of likelihoods, so the search probes a ladder of levels
// covering every place the optimum's evidence can sit; demand counts whose
// likelihoods underflow a double are handled without loss.

#include "cbi/constraints.hpp"
#include "cbi/detail/numeric.hpp"
#include "cbi/error.hpp"
#include "cbi/feasibility.hpp"
#include "cbi/grid.hpp"
#include "cbi/inference.hpp"
#include "cbi/objective.hpp"
#include "cbi/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbi {

enum class SolverStatus { optimal, grid_limited, infeasible };

[[nodiscard]] inline const char* to_string(SolverStatus s)
{
    switch (s) {
    case SolverStatus::optimal:
        return "optimal";
    case SolverStatus::grid_limited:
        return "grid-limited";
    case SolverStatus::infeasible:
        return "infeasible";
    }
    return "unknown";
}

struct CbiResult
{
    double bound = std::numeric_limits<double>::quiet_NaN();
    std::optional<PriorDistribution> witness;
    ObjectiveSpec objective;
    Observation observation;
    std::size_t grid_resolution = 0;
    SolverStatus status = SolverStatus::infeasible;
    /// Minimal unsatisfiable constraint subset when infeasible.
    std::vector<std::size_t> unsatisfiable;
};

/// Slack applied to equality constraints inside the linear program.
inline constexpr double kEqualitySlack = 1e-12;
/// Change in bound that marks a result as limited by grid spacing.
inline constexpr double kGridLimitedThreshold = 1e-6;

struct SolveOptions
{
    /// Re-solve on a grid refined around the witness and report grid_limited
    /// when the bound moves by more than kGridLimitedThreshold.
    bool probe_refinement = true;
};

/// True when `candidate` is on the assessor's worse side of `incumbent`.
[[nodiscard]] inline bool more_conservative(Direction dir, double candidate, double incumbent, double margin = 0.0)
{
    return dir == Direction::conservative_max ? candidate > incumbent + margin : candidate < incumbent - margin;
}

namespace detail {

struct GridModel
{
    std::vector<double> points;
    std::vector<double> log_lik;
    std::vector<double> integrand;
    double max_log_lik = kNegInf;
    double min_log_lik = std::numeric_limits<double>::infinity();

    GridModel(const PfdGrid& grid, const Observation& obs, const ObjectiveSpec& objective) : points(grid.points())
    {
        log_lik.reserve(points.size());
        integrand.reserve(points.size());
        for (double p : points) {
            const double ll = log_likelihood(p, obs);
            log_lik.push_back(ll);
            integrand.push_back(objective_integrand(objective, p));
            if (ll != kNegInf) {
                max_log_lik = std::max(max_log_lik, ll);
                min_log_lik = std::min(min_log_lik, ll);
            }
        }
    }
};

/// Constraint offsets coefficient(c, p_i) - rhs(c) for every grid point.
struct ConstraintTable
{
    std::vector<Relation> relations;
    std::vector<double> rhs_values;
    std::vector<std::vector<double>> offsets;
    /// Columns no admissible prior can put mass on.
    std::vector<bool> forbidden;

    ConstraintTable(std::span<const PartialPriorConstraint> constraints, std::span<const double> points)
    {
        for (const auto& c : constraints) {
            relations.push_back(relation(c));
            rhs_values.push_back(rhs(c));
            std::vector<double> row(points.size());
            for (std::size_t i = 0; i < points.size(); ++i) {
                row[i] = coefficient(c, points[i]) - rhs(c);
            }
            offsets.push_back(std::move(row));
        }
        // A one-sided row whose offsets never take the helpful sign can only
        // hold with zero mass on the columns that take the harmful one.
        forbidden.assign(points.size(), false);
        for (std::size_t c = 0; c < size(); ++c) {
            const auto& row = offsets[c];
            const double lo = *std::min_element(row.begin(), row.end());
            const double hi = *std::max_element(row.begin(), row.end());
            const bool at_least = relations[c] == Relation::greater_equal ||
                                  (relations[c] == Relation::equal && rhs_values[c] >= 1.0);
            const bool at_most = relations[c] == Relation::less_equal ||
                                 (relations[c] == Relation::equal && rhs_values[c] <= 0.0);
            for (std::size_t i = 0; i < points.size(); ++i) {
                if ((at_least && hi <= 0.0 && row[i] < 0.0) || (at_most && lo >= 0.0 && row[i] > 0.0)) {
                    forbidden[i] = true;
                }
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return relations.size(); }
};

/// Half-width in nats of the likelihood band a probe resolves. Columns below
/// the band are treated as carrying no evidence and columns above it as
/// carrying no prior mass. Both errors stay under exp(-37) relative while the
/// probe sits within half a probe spacing of the optimum's log evidence.
inline constexpr double kBandHalfWidth = 50.0;
inline constexpr double kProbeSpacing = 25.0;
/// Each probe only admits priors whose log evidence lies within this many
/// nats of its reference level, which keeps the band approximations valid.
inline constexpr double kEvidenceWindow = 15.0;
/// Deepest log evidence searched below any column's log-likelihood.
inline constexpr double kProbeDepth = 100.0;

struct ScaledSolve
{
    bool lp_feasible = false;
    std::optional<PriorDistribution> prior;
};

/// Solves the ratio-transformed LP over `columns` (grid indices) with
/// likelihoods taken relative to exp(log_ref), restricted to priors whose
/// log evidence is within `window` nats of log_ref.
inline ScaledSolve solve_scaled(const GridModel& model, const ConstraintTable& table, Direction dir,
                                double log_ref, std::span<const std::size_t> columns,
                                double window = kEvidenceWindow)
{
    const std::size_t n = columns.size();
    std::vector<double> rel(n);
    std::vector<double> scale(n);
    std::vector<bool> free_mass(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double d = model.log_lik[columns[j]] - log_ref;
        rel[j] = d < -kBandHalfWidth ? 0.0 : std::exp(std::min(d, 700.0));
        scale[j] = std::max(1.0, rel[j]);
        free_mass[j] = d > kBandHalfWidth;
    }

    lp::LinearProgram prog;
    prog.num_vars = n;
    prog.sense = dir == Direction::conservative_max ? lp::Sense::maximize : lp::Sense::minimize;
    prog.objective.resize(n);
    lp::Row norm{std::vector<double>(n), lp::RowType::equal, 1.0};
    for (std::size_t j = 0; j < n; ++j) {
        prog.objective[j] = rel[j] * model.integrand[columns[j]] / scale[j];
        norm.coeffs[j] = rel[j] / scale[j];
    }
    prog.rows.push_back(std::move(norm));
    // Total mass in these units is exp(log_ref) / evidence.
    lp::Row mass{std::vector<double>(n), lp::RowType::less_equal, std::exp(window)};
    for (std::size_t j = 0; j < n; ++j) {
        mass.coeffs[j] = 1.0 / scale[j];
    }
    prog.rows.push_back(mass);
    mass.type = lp::RowType::greater_equal;
    mass.rhs = std::exp(-window);
    prog.rows.push_back(std::move(mass));
    for (std::size_t c = 0; c < table.size(); ++c) {
        auto make_row = [&](double shift, lp::RowType type) {
            lp::Row row{std::vector<double>(n), type, 0.0};
            for (std::size_t j = 0; j < n; ++j) {
                row.coeffs[j] = free_mass[j] ? 0.0 : (table.offsets[c][columns[j]] - shift) / scale[j];
            }
            return row;
        };
        switch (table.relations[c]) {
        case Relation::less_equal:
            prog.rows.push_back(make_row(0.0, lp::RowType::less_equal));
            break;
        case Relation::greater_equal:
            prog.rows.push_back(make_row(0.0, lp::RowType::greater_equal));
            break;
        case Relation::equal:
            // Equality coefficients lie in [0,1], so a right-hand side at
            // either end is a one-sided bound and needs no slack.
            if (table.rhs_values[c] >= 1.0) {
                prog.rows.push_back(make_row(0.0, lp::RowType::greater_equal));
            } else if (table.rhs_values[c] <= 0.0) {
                prog.rows.push_back(make_row(0.0, lp::RowType::less_equal));
            } else {
                prog.rows.push_back(make_row(kEqualitySlack, lp::RowType::less_equal));
                prog.rows.push_back(make_row(-kEqualitySlack, lp::RowType::greater_equal));
            }
            break;
        }
    }

    const auto sol = lp::solve(prog);
    ScaledSolve out;
    if (sol.status != lp::Status::optimal) {
        return out;
    }
    out.lp_feasible = true;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < n; ++j) {
        const double y = sol.x[j] / scale[j];
        if (y > 0.0) {
            pts.emplace_back(model.points[columns[j]], y);
        }
    }
    if (!pts.empty()) {
        out.prior = PriorDistribution::from_points(pts);
    }
    return out;
}

/// A subset of `cols` whose constraint offsets generate the same convex cone.
/// Columns that carry no evidence enter the LP only through that cone, so
/// the rest are redundant. Handles up to two constraints; returns `cols`
/// unchanged otherwise.
[[nodiscard]] inline std::vector<std::size_t> cone_generators(const ConstraintTable& table,
                                                              std::vector<std::size_t> cols)
{
    if (table.size() == 0) {
        return {};
    }
    if (table.size() == 1) {
        const auto& v = table.offsets[0];
        std::optional<std::size_t> pos;
        std::optional<std::size_t> neg;
        for (std::size_t c : cols) {
            if (v[c] > 0.0 && (!pos || v[c] > v[*pos])) {
                pos = c;
            } else if (v[c] < 0.0 && (!neg || v[c] < v[*neg])) {
                neg = c;
            }
        }
        std::vector<std::size_t> out;
        for (const auto& c : {pos, neg}) {
            if (c) {
                out.push_back(*c);
            }
        }
        return out;
    }
    if (table.size() > 2) {
        return cols;
    }

    struct Ray
    {
        double angle;
        std::size_t col;
    };
    std::vector<Ray> rays;
    for (std::size_t c : cols) {
        const double x = table.offsets[0][c];
        const double y = table.offsets[1][c];
        if (x != 0.0 || y != 0.0) {
            rays.push_back({std::atan2(y, x), c});
        }
    }
    if (rays.empty()) {
        return {};
    }
    std::stable_sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) { return a.angle < b.angle; });
    constexpr double two_pi = 6.283185307179586;
    // Widest angular gap between consecutive rays, as the index of the ray
    // that opens it.
    auto widest_gap = [&](const std::vector<std::size_t>& idx) {
        std::size_t at = idx.size() - 1;
        double widest = rays[idx.front()].angle + two_pi - rays[idx.back()].angle;
        for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
            const double gap = rays[idx[i + 1]].angle - rays[idx[i]].angle;
            if (gap > widest) {
                widest = gap;
                at = i;
            }
        }
        return std::pair{at, widest};
    };
    std::vector<std::size_t> all(rays.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    const auto [open, target] = widest_gap(all);
    std::vector<std::size_t> chosen{open};
    const std::size_t close = (open + 1) % rays.size();
    if (close != open && rays[close].angle != rays[open].angle) {
        chosen.push_back(close);
    }
    std::sort(chosen.begin(), chosen.end());
    for (;;) {
        const auto [at, gap] = widest_gap(chosen);
        if (gap <= target + 1e-12) {
            break;
        }
        // Split the offending gap at the ray nearest its middle.
        const double from = rays[chosen[at]].angle;
        const double mid = from + 0.5 * gap;
        std::optional<std::size_t> best;
        double best_dist = 0.0;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            double a = rays[i].angle;
            if (a <= from) {
                a += two_pi;
            }
            if (a >= from + gap) {
                continue;
            }
            const double dist = std::abs(a - mid);
            if (!best || dist < best_dist) {
                best = i;
                best_dist = dist;
            }
        }
        if (!best) {
            break;
        }
        chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), *best), *best);
    }
    std::vector<std::size_t> out;
    for (std::size_t i : chosen) {
        out.push_back(rays[i].col);
    }
    return out;
}

struct Candidate
{
    PriorDistribution prior;
    double value = 0.0;
    double log_evidence = 0.0;
};

/// Probes reference evidence levels every kProbeSpacing nats across every
/// range the optimum's log evidence can occupy. Each probe keeps the columns
/// inside its likelihood band, a cone-generating subset of those below it
/// and the single best of those above it.
class WorstCaseSearch
{
public:
    WorstCaseSearch(const GridModel& model, std::span<const PartialPriorConstraint> constraints,
                    const Observation& obs, const ObjectiveSpec& objective)
        : model_(model), table_(constraints, model.points), constraints_(constraints), obs_(obs),
          objective_(objective), dir_(direction(objective))
    {
        std::vector<std::size_t> dead;
        for (std::size_t i = 0; i < model_.points.size(); ++i) {
            if (table_.forbidden[i]) {
                continue;
            }
            (model_.log_lik[i] == kNegInf ? dead : order_).push_back(i);
        }
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return model_.log_lik[a] < model_.log_lik[b]; });
        sorted_ll_.reserve(order_.size());
        for (std::size_t i : order_) {
            sorted_ll_.push_back(model_.log_lik[i]);
        }

        compress_ = table_.size() <= 2;
        if (compress_) {
            below_.reserve(order_.size() + 1);
            below_.push_back(cone_generators(table_, dead));
            for (std::size_t i : order_) {
                auto next = below_.back();
                next.push_back(i);
                below_.push_back(cone_generators(table_, std::move(next)));
            }
        } else {
            dead_ = std::move(dead);
        }

        above_.assign(order_.size() + 1, order_.size());
        for (std::size_t i = order_.size(); i-- > 0;) {
            const std::size_t next = above_[i + 1];
            above_[i] = next == order_.size() || worse_integrand(order_[i], order_[next]) ? i : next;
        }
    }

    void run()
    {
        for (double level : probe_levels()) {
            attempt(level);
        }
        // Re-centre on the incumbent's own evidence.
        for (int iter = 0; iter < 4 && best_; ++iter) {
            const double before = best_->value;
            attempt(best_->log_evidence);
            if (!more_conservative(dir_, best_->value, before)) {
                break;
            }
        }
    }

    [[nodiscard]] const std::optional<Candidate>& best() const noexcept { return best_; }
    [[nodiscard]] bool any_lp_feasible() const noexcept { return any_lp_feasible_; }

private:
    /// True when grid column `a` has a strictly worse integrand than `b`, or
    /// an equal one at a lower index.
    [[nodiscard]] bool worse_integrand(std::size_t a, std::size_t b) const
    {
        const double ga = model_.integrand[a];
        const double gb = model_.integrand[b];
        if (ga == gb) {
            return a < b;
        }
        return dir_ == Direction::conservative_max ? ga > gb : ga < gb;
    }

    [[nodiscard]] std::vector<double> probe_levels() const
    {
        std::vector<double> levels;
        double lo = 0.0;
        double hi = 0.0;
        bool open = false;
        auto flush = [&] {
            for (double r = lo; r < hi; r += kProbeSpacing) {
                levels.push_back(r);
            }
            levels.push_back(hi);
        };
        for (double ll : sorted_ll_) {
            const double a = ll - kProbeDepth;
            const double b = ll + 5.0;
            if (open && a <= hi + kProbeSpacing) {
                hi = std::max(hi, b);
                continue;
            }
            if (open) {
                flush();
            }
            lo = a;
            hi = b;
            open = true;
        }
        if (open) {
            flush();
        }
        return levels;
    }

    [[nodiscard]] std::vector<std::size_t> columns_for(double log_ref) const
    {
        const auto first = static_cast<std::size_t>(
            std::lower_bound(sorted_ll_.begin(), sorted_ll_.end(), log_ref - kBandHalfWidth) - sorted_ll_.begin());
        const auto last = static_cast<std::size_t>(
            std::upper_bound(sorted_ll_.begin(), sorted_ll_.end(), log_ref + kBandHalfWidth) - sorted_ll_.begin());
        std::vector<std::size_t> cols;
        if (compress_) {
            cols = below_[first];
        } else {
            cols = dead_;
            cols.insert(cols.end(), order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(first));
        }
        cols.insert(cols.end(), order_.begin() + static_cast<std::ptrdiff_t>(first),
                    order_.begin() + static_cast<std::ptrdiff_t>(std::max(first, last)));
        if (last < order_.size()) {
            cols.push_back(order_[above_[last]]);
        }
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        return cols;
    }

    void attempt(double log_ref)
    {
        const auto cols = columns_for(log_ref);
        auto s = solve_scaled(model_, table_, dir_, log_ref, cols);
        if (!s.lp_feasible) {
            return;
        }
        any_lp_feasible_ = true;
        if (!s.prior) {
            return;
        }
        PosteriorSummary summary;
        try {
            summary = posterior_summary(*s.prior, obs_, objective_);
        } catch (const ZeroEvidenceError&) {
            return;
        }
        if (satisfies_all(*s.prior, constraints_) &&
            (!best_ || more_conservative(dir_, summary.value, best_->value))) {
            best_ = Candidate{std::move(*s.prior), summary.value, summary.log_evidence};
        }
    }

    const GridModel& model_;
    ConstraintTable table_;
    std::span<const PartialPriorConstraint> constraints_;
    Observation obs_;
    ObjectiveSpec objective_;
    Direction dir_;
    /// Columns with finite log-likelihood, ascending by it.
    std::vector<std::size_t> order_;
    std::vector<double> sorted_ll_;
    bool compress_ = true;
    /// below_[i]: cone generators of the zero-likelihood columns and order_[0..i).
    std::vector<std::vector<std::size_t>> below_;
    /// Zero-likelihood columns, kept whole when not compressing.
    std::vector<std::size_t> dead_;
    /// above_[i]: position in order_ of the worst integrand among order_[i..].
    std::vector<std::size_t> above_;
    std::optional<Candidate> best_;
    bool any_lp_feasible_ = false;
};

inline PfdGrid refine_around(const PfdGrid& grid, const PriorDistribution& witness)
{
    const auto& g = grid.points();
    std::vector<double> pts = g;
    auto subdivide = [&](double a, double b) {
        for (double f : {0.25, 0.5, 0.75}) {
            pts.push_back(a + f * (b - a));
        }
        if (a > 0.0) {
            pts.push_back(std::sqrt(a * b));
        }
    };
    for (double p : witness.support()) {
        const auto i = grid.index_of_nearest(p);
        if (i > 0) {
            subdivide(g[i - 1], g[i]);
        }
        if (i + 1 < g.size()) {
            subdivide(g[i], g[i + 1]);
        }
    }
    return PfdGrid::from_points(std::move(pts));
}

} // namespace detail

/// Conservative bound over all priors supported on `grid` that satisfy every
/// constraint: the maximum of the posterior expected pfd, or the minimum of
/// posterior confidence / future reliability.
[[nodiscard]] inline CbiResult solve(std::span<const PartialPriorConstraint> constraints, const Observation& obs,
                                     const ObjectiveSpec& objective, const PfdGrid& grid,
                                     const SolveOptions& options = {})
{
    validate(obs);
    validate(objective);
    CbiResult result;
    result.objective = objective;
    result.observation = obs;
    result.grid_resolution = grid.size();

    auto feasibility = check_feasible(constraints, grid);
    if (!feasibility.feasible) {
        result.status = SolverStatus::infeasible;
        result.unsatisfiable = std::move(feasibility.unsatisfiable);
        return result;
    }

    const detail::GridModel model(grid, obs, objective);
    if (model.max_log_lik == detail::kNegInf) {
        throw ZeroEvidenceError("observation has zero likelihood at every grid point");
    }
    detail::WorstCaseSearch search(model, constraints, obs, objective);
    search.run();

    if (!search.best()) {
        if (!search.any_lp_feasible()) {
            throw ZeroEvidenceError("observation has zero likelihood under every admissible prior");
        }
        throw Error("worst-case search produced no admissible witness");
    }
    result.bound = search.best()->value;
    result.witness = search.best()->prior;
    result.status = SolverStatus::optimal;

    if (options.probe_refinement) {
        const auto refined = detail::refine_around(grid, *result.witness);
        const auto finer = solve(constraints, obs, objective, refined, SolveOptions{false});
        if (finer.status != SolverStatus::infeasible &&
            more_conservative(direction(objective), finer.bound, result.bound, kGridLimitedThreshold)) {
            result.status = SolverStatus::grid_limited;
        }
    }
    return result;
}

/// Debug cross-check: bisection on the bound, deciding each trial level by
/// the sign of the optimum of sum_i mass_i L_i (g_i - level) over admissible
/// priors. Likelihoods are scaled by the grid maximum, so this is only
/// reliable while the worst-case evidence stays within double range of it.
[[nodiscard]] inline double solve_by_bisection(std::span<const PartialPriorConstraint> constraints,
                                               const Observation& obs, const ObjectiveSpec& objective,
                                               const PfdGrid& grid, double tolerance = 1e-10)
{
    validate(obs);
    validate(objective);
    if (!check_feasible(constraints, grid).feasible) {
        throw InfeasibleConstraints("constraint set is infeasible on the grid");
    }
    const detail::GridModel model(grid, obs, objective);
    if (model.max_log_lik == detail::kNegInf) {
        throw ZeroEvidenceError("observation has zero likelihood at every grid point");
    }
    const Direction dir = direction(objective);
    std::vector<double> rel(model.points.size());
    for (std::size_t i = 0; i < rel.size(); ++i) {
        rel[i] = std::exp(model.log_lik[i] - model.max_log_lik);
    }
    // exceeds(level): is there an admissible prior strictly worse than `level`?
    auto exceeds = [&](double level) {
        std::vector<double> obj(rel.size());
        const double sign = dir == Direction::conservative_max ? 1.0 : -1.0;
        for (std::size_t i = 0; i < rel.size(); ++i) {
            obj[i] = sign * rel[i] * (model.integrand[i] - level);
        }
        lp::LinearProgram prog;
        prog.num_vars = rel.size();
        prog.objective = obj;
        prog.rows = detail::mass_rows(constraints, model.points);
        const auto sol = lp::solve(prog);
        return sol.status == lp::Status::optimal && sol.value > 1e-14;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const bool worse_exists = exceeds(mid);
        if (dir == Direction::conservative_max) {
            (worse_exists ? lo : hi) = mid;
        } else {
            (worse_exists ? hi : lo) = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct CurvePoint
{
    std::uint64_t n = 0;
    double bound = 0.0;
};

/// One conservative bound per demand count, all with `k` failures.
[[nodiscard]] inline std::vector<CurvePoint> curve(std::span<const PartialPriorConstraint> constraints,
                                                   const ObjectiveSpec& objective,
                                                   std::span<const std::uint64_t> n_values, std::uint64_t k,
                                                   const PfdGrid& grid)
{
    if (!std::is_sorted(n_values.begin(), n_values.end())) {
        throw InvalidInput("curve demand counts must be sorted ascending");
    }
    std::vector<CurvePoint> out;
    out.reserve(n_values.size());
    for (std::uint64_t n : n_values) {
        const auto r = solve(constraints, Observation{n, k}, objective, grid, SolveOptions{false});
        if (r.status == SolverStatus::infeasible) {
            throw InfeasibleConstraints("constraint set is infeasible on the grid");
        }
        out.push_back({n, r.bound});
    }
    return out;
}

} // namespace cbi
