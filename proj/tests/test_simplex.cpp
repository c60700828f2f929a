#include "cbi/simplex.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <random>

using namespace cbi::lp;

TEST(Simplex, TextbookMaximum)
{
    // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36
    LinearProgram lp{2, {3, 5}, Sense::maximize,
                     {{{1, 0}, RowType::less_equal, 4}, {{0, 2}, RowType::less_equal, 12},
                      {{3, 2}, RowType::less_equal, 18}}};
    const auto s = solve(lp);
    ASSERT_EQ(s.status, Status::optimal);
    EXPECT_NEAR(s.value, 36.0, 1e-12);
    EXPECT_NEAR(s.x[0], 2.0, 1e-12);
    EXPECT_NEAR(s.x[1], 6.0, 1e-12);
}

TEST(Simplex, MinimumWithEqualityAndGreaterEqual)
{
    // min x + 2y s.t. x + y = 1, y >= 0.25 -> (0.75, 0.25), value 1.25
    LinearProgram lp{2, {1, 2}, Sense::minimize,
                     {{{1, 1}, RowType::equal, 1}, {{0, 1}, RowType::greater_equal, 0.25}}};
    const auto s = solve(lp);
    ASSERT_EQ(s.status, Status::optimal);
    EXPECT_NEAR(s.value, 1.25, 1e-12);
}

TEST(Simplex, DetectsInfeasibility)
{
    LinearProgram lp{1, {1}, Sense::maximize, {{{1}, RowType::less_equal, 1}, {{1}, RowType::greater_equal, 2}}};
    EXPECT_EQ(solve(lp).status, Status::infeasible);
}

TEST(Simplex, DetectsUnboundedness)
{
    LinearProgram lp{2, {1, 1}, Sense::maximize, {{{1, -1}, RowType::less_equal, 1}}};
    EXPECT_EQ(solve(lp).status, Status::unbounded);
}

TEST(Simplex, NegativeRightHandSide)
{
    // -x <= -2 means x >= 2
    LinearProgram lp{1, {1}, Sense::minimize, {{{-1}, RowType::less_equal, -2}}};
    const auto s = solve(lp);
    ASSERT_EQ(s.status, Status::optimal);
    EXPECT_NEAR(s.value, 2.0, 1e-12);
}

TEST(Simplex, BealeCyclingExampleTerminates)
{
    // Cycles under the textbook most-negative rule without anti-cycling.
    LinearProgram lp{4, {0.75, -150, 0.02, -6}, Sense::maximize,
                     {{{0.25, -60, -0.04, 9}, RowType::less_equal, 0},
                      {{0.5, -90, -0.02, 3}, RowType::less_equal, 0},
                      {{0, 0, 1, 0}, RowType::less_equal, 1}}};
    const auto s = solve(lp);
    ASSERT_EQ(s.status, Status::optimal);
    EXPECT_NEAR(s.value, 0.05, 1e-10);
}

TEST(Simplex, RedundantEqualities)
{
    LinearProgram lp{2, {1, 0}, Sense::maximize,
                     {{{1, 1}, RowType::equal, 1}, {{2, 2}, RowType::equal, 2}, {{1, 0}, RowType::less_equal, 0.3}}};
    const auto s = solve(lp);
    ASSERT_EQ(s.status, Status::optimal);
    EXPECT_NEAR(s.value, 0.3, 1e-12);
}

namespace {

std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
                piv = r;
            }
        }
        if (std::abs(a[piv][c]) < 1e-10) {
            return std::nullopt;
        }
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) {
                continue;
            }
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        b[i] /= a[i][i];
    }
    return b;
}

/// Best vertex of {A x <= b, x >= 0} by trying every choice of n tight
/// constraints among the rows and the bounds.
std::optional<double> vertex_maximum(const LinearProgram& lp)
{
    const std::size_t n = lp.num_vars;
    std::vector<std::vector<double>> all;
    std::vector<double> rhs;
    for (const auto& r : lp.rows) {
        all.push_back(r.coeffs);
        rhs.push_back(r.rhs);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = -1.0;
        all.push_back(e);
        rhs.push_back(0.0);
    }
    std::optional<double> best;
    const std::size_t m = all.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n) {
            continue;
        }
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (std::size_t{1} << i)) {
                a.push_back(all[i]);
                b.push_back(rhs[i]);
            }
        }
        const auto x = solve_square(a, b);
        if (!x) {
            continue;
        }
        bool ok = true;
        for (std::size_t i = 0; i < m && ok; ++i) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                lhs += all[i][j] * (*x)[j];
            }
            ok = lhs <= rhs[i] + 1e-9;
        }
        if (!ok) {
            continue;
        }
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            v += lp.objective[j] * (*x)[j];
        }
        if (!best || v > *best) {
            best = v;
        }
    }
    return best;
}

} // namespace

TEST(Simplex, AgreesWithVertexEnumerationOnRandomBoundedPrograms)
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.1, 2.0);
    int compared = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 2 + rng() % 3;
        const std::size_t rows = 1 + rng() % 4;
        LinearProgram lp;
        lp.num_vars = n;
        lp.sense = Sense::maximize;
        for (std::size_t j = 0; j < n; ++j) {
            lp.objective.push_back(coef(rng));
        }
        for (std::size_t i = 0; i < rows; ++i) {
            Row r{{}, RowType::less_equal, coef(rng)};
            for (std::size_t j = 0; j < n; ++j) {
                r.coeffs.push_back(coef(rng));
            }
            lp.rows.push_back(r);
        }
        // Box keeps every program bounded.
        Row box{std::vector<double>(n, 1.0), RowType::less_equal, pos(rng)};
        lp.rows.push_back(box);

        const auto expected = vertex_maximum(lp);
        const auto s = solve(lp);
        if (!expected) {
            EXPECT_EQ(s.status, Status::infeasible);
            continue;
        }
        ASSERT_EQ(s.status, Status::optimal) << "trial " << trial;
        EXPECT_NEAR(s.value, *expected, 1e-9) << "trial " << trial;
        ++compared;
    }
    EXPECT_GT(compared, 150);
}
