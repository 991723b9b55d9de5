#pragma once

#include <set>
#include <span>
#include <vector>

#include "mars/configuration.hpp"

namespace mars {

// Ordered 4-connected waypoints; length = waypoints - 1.
struct GridPath {
    std::vector<Cell> waypoints;

    int length() const { return waypoints.empty() ? 0 : static_cast<int>(waypoints.size()) - 1; }
    Cell start() const { return waypoints.front(); }
    Cell goal() const { return waypoints.back(); }

    friend bool operator==(const GridPath&, const GridPath&) = default;
};

inline constexpr int kArenaMargin = 2;

// Bounding box of the occupied cells plus `extra`, inflated by kArenaMargin.
BoundingBox planning_arena(const Configuration& config, std::span<const Cell> extra = {});

// Shortest path for a single unit; every other unit is an obstacle.
GridPath astar_unit(const Configuration& config, Cell start, Cell goal);
GridPath astar_unit(const Configuration& config, Cell start, Cell goal, const BoundingBox& arena);

// Shortest sequence of unit translations of the rigid footprint `moving`
// bringing `reference` (a member of `moving`) to `goal_anchor`. Waypoints are
// reference-cell positions.
GridPath astar_subassembly(const Configuration& config, std::span<const Cell> moving, Cell reference,
                           Cell goal_anchor);
GridPath astar_subassembly(const Configuration& config, std::span<const Cell> moving, Cell reference,
                           Cell goal_anchor, const BoundingBox& arena);

// Union of the footprint over every waypoint.
std::vector<Cell> swept_cells(std::span<const Cell> moving, Cell reference, const GridPath& path);

// True when every placement along the path avoids the stationary units.
bool path_is_clear(const Configuration& config, std::span<const Cell> moving, Cell reference, const GridPath& path);

// Route for a rigid footprint where `soft` cells may be crossed at a price
// (they will be cleared beforehand). Minimises the number of soft cells
// touched first, path length second.
struct SoftRoute {
    GridPath path;
    std::vector<Cell> blockers;  // soft cells covered by the swept set, sorted
};

SoftRoute route_with_blockers(const std::set<Cell>& hard, const std::set<Cell>& soft, std::span<const Cell> moving,
                              Cell reference, Cell goal_anchor, const BoundingBox& arena);

}  // namespace mars
