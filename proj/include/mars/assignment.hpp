#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace mars {

inline constexpr std::int64_t kNoEdge = std::numeric_limits<std::int64_t>::max();

// Rows (targets) must each receive exactly one column (candidate); each column
// is used at most once. Entries equal to kNoEdge are forbidden.
using CostMatrix = std::vector<std::vector<std::int64_t>>;

struct AssignmentSolution {
    std::vector<int> column_of_row;
    std::int64_t total = 0;
};

// Exact minimum-cost assignment (Hungarian method). Among optimal solutions the
// lexicographically smallest column sequence is returned. Empty optional when
// no complete assignment exists.
std::optional<AssignmentSolution> solve_assignment(const CostMatrix& cost);

}  // namespace mars
