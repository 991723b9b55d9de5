#include "mars/configuration.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "mars/error.hpp"

namespace mars {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "invalid-input";
        case ErrorCode::CellNotOccupied: return "cell-not-occupied";
        case ErrorCode::CellOccupied: return "cell-occupied";
        case ErrorCode::DestinationCollision: return "destination-collision";
        case ErrorCode::NoPath: return "no-path";
        case ErrorCode::NoFeasibleDonor: return "no-feasible-donor";
        case ErrorCode::NoFeasibleVmcs: return "no-feasible-vmcs";
        case ErrorCode::UnboundedGrowth: return "unbounded-growth";
        case ErrorCode::InfeasibleAssignment: return "infeasible-assignment";
        case ErrorCode::InfeasibleTarget: return "infeasible-target";
        case ErrorCode::UnsafeStep: return "unsafe-step";
    }
    return "unknown";
}

std::string to_string(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

FaultState FaultState::rotor_fault(int rotor_index) {
    if (rotor_index < 0 || rotor_index >= kRotorsPerUnit)
        throw Error(ErrorCode::InvalidInput, "rotor index " + std::to_string(rotor_index) + " out of range");
    return FaultState(Kind::RotorFault, rotor_index);
}

RotorMask FaultState::dead_rotors() const {
    RotorMask mask;
    if (kind_ == Kind::UnitFault) mask.set();
    if (kind_ == Kind::RotorFault) mask.set(static_cast<std::size_t>(rotor_));
    return mask;
}

std::string to_string(const FaultState& s) {
    switch (s.kind()) {
        case FaultState::Kind::Healthy: return "healthy";
        case FaultState::Kind::RotorFault: return "rotor" + std::to_string(s.rotor_index());
        case FaultState::Kind::UnitFault: return "unit";
    }
    return "?";
}

Configuration Configuration::from_units(std::span<const std::pair<Cell, FaultState>> units) {
    Units map;
    for (const auto& [cell, state] : units) {
        if (!map.emplace(cell, state).second)
            throw Error(ErrorCode::InvalidInput, "duplicate cell " + to_string(cell));
    }
    return Configuration(std::move(map));
}

Configuration Configuration::healthy(std::span<const Cell> cells) {
    std::vector<std::pair<Cell, FaultState>> units;
    units.reserve(cells.size());
    for (Cell c : cells) units.emplace_back(c, FaultState::healthy());
    return from_units(units);
}

FaultState Configuration::state(Cell c) const {
    auto it = units_.find(c);
    return it == units_.end() ? FaultState::healthy() : it->second;
}

std::vector<Cell> Configuration::cells() const {
    std::vector<Cell> out;
    out.reserve(units_.size());
    for (const auto& [c, s] : units_) out.push_back(c);
    return out;
}

std::vector<Cell> Configuration::faulty_cells() const {
    std::vector<Cell> out;
    for (const auto& [c, s] : units_)
        if (s.is_faulty()) out.push_back(c);
    return out;
}

std::size_t Configuration::fault_count() const {
    return static_cast<std::size_t>(
        std::count_if(units_.begin(), units_.end(), [](const auto& u) { return u.second.is_faulty(); }));
}

std::vector<FaultState> Configuration::fault_multiset() const {
    std::vector<FaultState> out;
    for (const auto& [c, s] : units_)
        if (s.is_faulty()) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
}

Configuration Configuration::detach(Cell c) const {
    if (!occupied(c)) throw Error(ErrorCode::CellNotOccupied, "detach " + to_string(c));
    Units next = units_;
    next.erase(c);
    return Configuration(std::move(next));
}

Configuration Configuration::attach(Cell c, FaultState s) const {
    if (occupied(c)) throw Error(ErrorCode::CellOccupied, "attach " + to_string(c));
    Units next = units_;
    next.emplace(c, s);
    return Configuration(std::move(next));
}

Configuration Configuration::translate_set(std::span<const Cell> moving, Offset delta) const {
    Units next = units_;
    std::vector<std::pair<Cell, FaultState>> lifted;
    lifted.reserve(moving.size());
    for (Cell c : moving) {
        auto it = next.find(c);
        if (it == next.end()) throw Error(ErrorCode::CellNotOccupied, "translate " + to_string(c));
        lifted.emplace_back(c + delta, it->second);
        next.erase(it);
    }
    for (const auto& [dest, state] : lifted) {
        if (!next.emplace(dest, state).second)
            throw Error(ErrorCode::DestinationCollision, "destination " + to_string(dest) + " is occupied");
    }
    return Configuration(std::move(next));
}

Configuration Configuration::with_states(const Units& replacement) const {
    Units next = units_;
    for (const auto& [c, s] : replacement) {
        auto it = next.find(c);
        if (it == next.end()) throw Error(ErrorCode::CellNotOccupied, "state for " + to_string(c));
        it->second = s;
    }
    return Configuration(std::move(next));
}

void BoundingBox::extend(Cell c) {
    if (max_x < min_x) {
        *this = {c.x, c.y, c.x, c.y};
        return;
    }
    min_x = std::min(min_x, c.x);
    min_y = std::min(min_y, c.y);
    max_x = std::max(max_x, c.x);
    max_y = std::max(max_y, c.y);
}

BoundingBox bounding_box(std::span<const Cell> cells) {
    BoundingBox box;
    for (Cell c : cells) box.extend(c);
    return box;
}

std::vector<std::vector<Cell>> connected_components(std::span<const Cell> cells) {
    std::set<Cell> remaining(cells.begin(), cells.end());
    std::vector<std::vector<Cell>> components;
    while (!remaining.empty()) {
        std::vector<Cell> component;
        std::vector<Cell> stack{*remaining.begin()};
        remaining.erase(remaining.begin());
        while (!stack.empty()) {
            Cell c = stack.back();
            stack.pop_back();
            component.push_back(c);
            for (Offset o : kNeighbours) {
                auto it = remaining.find(c + o);
                if (it != remaining.end()) {
                    stack.push_back(*it);
                    remaining.erase(it);
                }
            }
        }
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
    }
    // Seeds are taken in increasing order, so components are already sorted by minimal cell.
    return components;
}

bool is_connected(std::span<const Cell> cells) { return connected_components(cells).size() <= 1; }

std::vector<Subassembly> partition(const Configuration& config) {
    const auto cells = config.cells();
    std::vector<Subassembly> out;
    for (const auto& component : connected_components(cells)) {
        Configuration::Units units;
        for (Cell c : component) units.emplace(c, config.state(c));
        out.push_back(Subassembly{Configuration(std::move(units))});
    }
    return out;
}

std::vector<Cell> normalize(std::span<const Cell> cells) {
    std::vector<Cell> out(cells.begin(), cells.end());
    if (out.empty()) return out;
    const auto box = bounding_box(cells);
    for (Cell& c : out) c = c - Offset{box.min_x, box.min_y};
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace mars
