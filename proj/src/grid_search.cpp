#include "mars/grid_search.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <tuple>

#include "mars/error.hpp"

namespace mars {

namespace {

struct SearchResult {
    GridPath path;
    bool found = false;
    std::set<Cell> frontier;
};

// A* over reference-cell positions. `step_cost` returns the cost of moving
// between two valid neighbouring positions (always >= 1, so Manhattan stays
// admissible). Open-list ties resolve on (f, h, cell).
SearchResult search(Cell start, Cell goal, const std::function<bool(Cell, std::set<Cell>&)>& valid,
                    const std::function<long(Cell, Cell)>& step_cost) {
    SearchResult result;
    using Entry = std::tuple<long, long, Cell>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    std::map<Cell, long> best;
    std::map<Cell, Cell> parent;
    std::set<Cell> closed;

    best[start] = 0;
    open.emplace(manhattan(start, goal), manhattan(start, goal), start);
    while (!open.empty()) {
        const auto [f, h, cell] = open.top();
        open.pop();
        if (closed.contains(cell)) continue;
        closed.insert(cell);
        if (cell == goal) {
            std::vector<Cell> rev{cell};
            for (Cell c = cell; c != start;) {
                c = parent.at(c);
                rev.push_back(c);
            }
            result.path.waypoints.assign(rev.rbegin(), rev.rend());
            result.found = true;
            return result;
        }
        const long g = best.at(cell);
        for (Offset o : kNeighbours) {
            const Cell next = cell + o;
            if (closed.contains(next) || !valid(next, result.frontier)) continue;
            const long cost = g + step_cost(cell, next);
            auto it = best.find(next);
            if (it != best.end() && it->second <= cost) continue;
            best[next] = cost;
            parent[next] = cell;
            const long hn = manhattan(next, goal);
            open.emplace(cost + hn, hn, next);
        }
    }
    return result;
}

std::vector<Offset> relative_footprint(std::span<const Cell> moving, Cell reference) {
    std::vector<Offset> rel;
    rel.reserve(moving.size());
    for (Cell c : moving) rel.push_back(c - reference);
    return rel;
}

std::set<Cell> stationary_cells(const Configuration& config, std::span<const Cell> moving) {
    std::set<Cell> out;
    for (const auto& [c, s] : config.units()) out.insert(c);
    for (Cell c : moving) out.erase(c);
    return out;
}

}  // namespace

BoundingBox planning_arena(const Configuration& config, std::span<const Cell> extra) {
    BoundingBox box;
    for (const auto& [c, s] : config.units()) box.extend(c);
    for (Cell c : extra) box.extend(c);
    return box.inflated(kArenaMargin);
}

GridPath astar_unit(const Configuration& config, Cell start, Cell goal) {
    const Cell extra[] = {goal};
    return astar_unit(config, start, goal, planning_arena(config, extra));
}

GridPath astar_unit(const Configuration& config, Cell start, Cell goal, const BoundingBox& arena) {
    const Cell moving[] = {start};
    if (!config.occupied(start)) throw Error(ErrorCode::CellNotOccupied, "path start " + to_string(start));
    if (goal != start && config.occupied(goal)) throw Error(ErrorCode::CellOccupied, "path goal " + to_string(goal));
    return astar_subassembly(config, moving, start, goal, arena);
}

GridPath astar_subassembly(const Configuration& config, std::span<const Cell> moving, Cell reference,
                           Cell goal_anchor) {
    std::vector<Cell> goal_cells;
    for (Cell c : moving) goal_cells.push_back(c + (goal_anchor - reference));
    return astar_subassembly(config, moving, reference, goal_anchor, planning_arena(config, goal_cells));
}

GridPath astar_subassembly(const Configuration& config, std::span<const Cell> moving, Cell reference,
                           Cell goal_anchor, const BoundingBox& arena) {
    const auto rel = relative_footprint(moving, reference);
    const auto obstacles = stationary_cells(config, moving);
    auto valid = [&](Cell pos, std::set<Cell>& frontier) {
        bool ok = true;
        for (Offset o : rel) {
            const Cell c = pos + o;
            if (!arena.contains(c)) return false;
            if (obstacles.contains(c)) {
                frontier.insert(c);
                ok = false;
            }
        }
        return ok;
    };
    auto unit_cost = [](Cell, Cell) { return 1L; };
    std::set<Cell> ignored;
    if (!valid(reference, ignored))
        throw Error(ErrorCode::DestinationCollision, "moving set overlaps stationary units");
    auto result = search(reference, goal_anchor, valid, unit_cost);
    if (!result.found) {
        throw NoPathError("no path from " + to_string(reference) + " to " + to_string(goal_anchor),
                          std::vector<Cell>(result.frontier.begin(), result.frontier.end()));
    }
    return std::move(result.path);
}

std::vector<Cell> swept_cells(std::span<const Cell> moving, Cell reference, const GridPath& path) {
    std::set<Cell> swept;
    for (Cell w : path.waypoints)
        for (Cell c : moving) swept.insert(c + (w - reference));
    return {swept.begin(), swept.end()};
}

bool path_is_clear(const Configuration& config, std::span<const Cell> moving, Cell reference, const GridPath& path) {
    if (path.waypoints.empty() || path.start() != reference) return false;
    const auto obstacles = stationary_cells(config, moving);
    for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
        if (i > 0 && !adjacent(path.waypoints[i - 1], path.waypoints[i])) return false;
        for (Cell c : moving)
            if (obstacles.contains(c + (path.waypoints[i] - reference))) return false;
    }
    return true;
}

SoftRoute route_with_blockers(const std::set<Cell>& hard, const std::set<Cell>& soft, std::span<const Cell> moving,
                              Cell reference, Cell goal_anchor, const BoundingBox& arena) {
    // Blocker count dominates: one blocker costs more than any in-arena detour.
    const long blocker_weight = 4L * (arena.width() + 1) * (arena.height() + 1);
    const auto rel = relative_footprint(moving, reference);
    auto valid = [&](Cell pos, std::set<Cell>& frontier) {
        bool ok = true;
        for (Offset o : rel) {
            const Cell c = pos + o;
            if (!arena.contains(c)) return false;
            if (hard.contains(c)) {
                frontier.insert(c);
                ok = false;
            }
        }
        return ok;
    };
    auto cost = [&](Cell from, Cell to) {
        long newly = 0;
        for (Offset o : rel) {
            const Cell c = to + o;
            if (!soft.contains(c)) continue;
            bool covered_before = false;
            for (Offset p : rel) covered_before = covered_before || (from + p == c);
            if (!covered_before) ++newly;
        }
        return 1L + blocker_weight * newly;
    };
    auto result = search(reference, goal_anchor, valid, cost);
    if (!result.found) {
        throw NoPathError("no route from " + to_string(reference) + " to " + to_string(goal_anchor),
                          std::vector<Cell>(result.frontier.begin(), result.frontier.end()));
    }
    SoftRoute route{std::move(result.path), {}};
    for (Cell c : swept_cells(moving, reference, route.path))
        if (soft.contains(c)) route.blockers.push_back(c);
    return route;
}

}  // namespace mars
