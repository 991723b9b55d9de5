#include "mars/assignment.hpp"

#include <algorithm>

#include "mars/error.hpp"

namespace mars {

namespace {

// Shortest augmenting path Hungarian for n rows <= m columns. Forbidden edges
// carry `big`; the caller rejects solutions that use one.
std::int64_t hungarian(const CostMatrix& cost, const std::vector<int>& rows, const std::vector<int>& cols,
                       std::int64_t big, std::vector<int>* row_to_col) {
    const int n = static_cast<int>(rows.size());
    const int m = static_cast<int>(cols.size());
    if (n == 0) {
        if (row_to_col) row_to_col->clear();
        return 0;
    }
    auto a = [&](int i, int j) {
        const auto v = cost[static_cast<std::size_t>(rows[static_cast<std::size_t>(i - 1)])]
                           [static_cast<std::size_t>(cols[static_cast<std::size_t>(j - 1)])];
        return v == kNoEdge ? big : v;
    };
    const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(static_cast<std::size_t>(n + 1)), v(static_cast<std::size_t>(m + 1));
    std::vector<int> p(static_cast<std::size_t>(m + 1)), way(static_cast<std::size_t>(m + 1));
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<std::int64_t> minv(static_cast<std::size_t>(m + 1), inf);
        std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            std::int64_t delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const std::int64_t cur = a(i0, j) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    std::int64_t total = 0;
    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j) {
        const int i = p[static_cast<std::size_t>(j)];
        if (i == 0) continue;
        assignment[static_cast<std::size_t>(i - 1)] = cols[static_cast<std::size_t>(j - 1)];
        total += a(i, j);
    }
    if (row_to_col) *row_to_col = std::move(assignment);
    return total;
}

}  // namespace

std::optional<AssignmentSolution> solve_assignment(const CostMatrix& cost) {
    const std::size_t n = cost.size();
    if (n == 0) return AssignmentSolution{};
    const std::size_t m = cost.front().size();
    for (const auto& row : cost)
        if (row.size() != m) throw Error(ErrorCode::InvalidInput, "ragged cost matrix");
    if (m < n) return std::nullopt;

    // Any solution touching a forbidden edge costs at least `big`.
    std::int64_t finite_sum = 0;
    for (const auto& row : cost)
        for (auto v : row)
            if (v != kNoEdge) {
                if (v < 0) throw Error(ErrorCode::InvalidInput, "negative assignment cost");
                finite_sum += v;
            }
    const std::int64_t big = finite_sum + 1;

    std::vector<int> rows(n), cols(m);
    for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<int>(i);
    for (std::size_t j = 0; j < m; ++j) cols[j] = static_cast<int>(j);
    const std::int64_t optimum = hungarian(cost, rows, cols, big, nullptr);
    if (optimum >= big) return std::nullopt;

    // Canonicalise: fix rows in order to the smallest column that keeps the
    // remaining problem optimal.
    AssignmentSolution solution;
    solution.total = optimum;
    std::int64_t remaining = optimum;
    std::vector<int> free_cols = cols;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> rest_rows(rows.begin() + static_cast<std::ptrdiff_t>(i) + 1, rows.end());
        bool fixed = false;
        for (std::size_t idx = 0; idx < free_cols.size() && !fixed; ++idx) {
            const int j = free_cols[idx];
            const auto c = cost[i][static_cast<std::size_t>(j)];
            if (c == kNoEdge || c > remaining) continue;
            std::vector<int> rest_cols = free_cols;
            rest_cols.erase(rest_cols.begin() + static_cast<std::ptrdiff_t>(idx));
            const std::int64_t sub = hungarian(cost, rest_rows, rest_cols, big, nullptr);
            if (sub < big && c + sub == remaining) {
                solution.column_of_row.push_back(j);
                remaining -= c;
                free_cols = std::move(rest_cols);
                fixed = true;
            }
        }
        if (!fixed) throw Error(ErrorCode::InfeasibleAssignment, "canonicalisation lost optimality");
    }
    return solution;
}

}  // namespace mars
