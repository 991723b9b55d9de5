#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mars/cell.hpp"

namespace mars {

// Occupancy of the grid: the pair (P, F). A value type; every editing
// operation returns a new configuration.
class Configuration {
public:
    using Units = std::map<Cell, FaultState>;

    Configuration() = default;
    explicit Configuration(Units units) : units_(std::move(units)) {}
    // Throws InvalidInput on duplicate cells.
    static Configuration from_units(std::span<const std::pair<Cell, FaultState>> units);
    static Configuration healthy(std::span<const Cell> cells);

    const Units& units() const { return units_; }
    std::size_t size() const { return units_.size(); }
    bool empty() const { return units_.empty(); }
    bool occupied(Cell c) const { return units_.contains(c); }
    // Healthy for vacant cells.
    FaultState state(Cell c) const;

    std::vector<Cell> cells() const;
    std::vector<Cell> faulty_cells() const;
    std::size_t fault_count() const;
    std::vector<FaultState> fault_multiset() const;  // sorted

    Configuration detach(Cell c) const;
    Configuration attach(Cell c, FaultState s) const;
    Configuration translate_set(std::span<const Cell> moving, Offset delta) const;
    Configuration with_states(const Units& replacement) const;

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    Units units_;
};

struct BoundingBox {
    int min_x = 0, min_y = 0, max_x = -1, max_y = -1;

    bool contains(Cell c) const { return c.x >= min_x && c.x <= max_x && c.y >= min_y && c.y <= max_y; }
    BoundingBox inflated(int margin) const { return {min_x - margin, min_y - margin, max_x + margin, max_y + margin}; }
    int width() const { return max_x - min_x + 1; }
    int height() const { return max_y - min_y + 1; }
    void extend(Cell c);
};

BoundingBox bounding_box(std::span<const Cell> cells);

// One connected component (S_i, D_i). `units` holds only the component's cells.
struct Subassembly {
    Configuration units;

    std::vector<Cell> cells() const { return units.cells(); }
    std::vector<Cell> faulty_cells() const { return units.faulty_cells(); }
    bool has_fault() const { return units.fault_count() > 0; }
};

// Connected components under 4-adjacency, ordered by their minimal cell.
std::vector<Subassembly> partition(const Configuration& config);
std::vector<std::vector<Cell>> connected_components(std::span<const Cell> cells);
bool is_connected(std::span<const Cell> cells);

// Translates the cells so that the minimal (y, x) corner of the bounding box is
// the origin, then sorts them.
std::vector<Cell> normalize(std::span<const Cell> cells);

}  // namespace mars
