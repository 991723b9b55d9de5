#pragma once

#include <algorithm>
#include <initializer_list>
#include <random>
#include <set>
#include <vector>

#include "mars/configuration.hpp"

namespace testing {

using mars::Cell;
using mars::Configuration;
using mars::FaultState;

inline Configuration make(std::initializer_list<Cell> cells, std::initializer_list<Cell> unit_faults = {}) {
    Configuration::Units units;
    for (Cell c : cells) units.emplace(c, FaultState::healthy());
    for (Cell c : unit_faults) units[c] = FaultState::unit_fault();
    return Configuration(units);
}

inline Configuration rect(int w, int h, std::initializer_list<Cell> unit_faults = {}) {
    Configuration::Units units;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) units.emplace(Cell{x, y}, FaultState::healthy());
    for (Cell c : unit_faults) units[c] = FaultState::unit_fault();
    return Configuration(units);
}

inline std::vector<Cell> heart_cells() {
    return {{1, 0}, {3, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {1, 2}, {2, 2}, {3, 2}, {2, 3}};
}

// Random 4-connected footprint grown from the origin.
inline std::vector<Cell> random_footprint(std::mt19937_64& rng, int n) {
    std::vector<Cell> cells{{0, 0}};
    std::set<Cell> have{{0, 0}};
    while (static_cast<int>(cells.size()) < n) {
        const Cell base = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
        const auto o = mars::kNeighbours[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
        if (have.insert(base + o).second) cells.push_back(base + o);
    }
    std::sort(cells.begin(), cells.end());
    return cells;
}

}  // namespace testing
