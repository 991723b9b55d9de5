#pragma once

#include <array>
#include <bitset>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace mars {

struct Offset {
    int dx = 0;
    int dy = 0;

    friend constexpr bool operator==(const Offset&, const Offset&) = default;
};

// Grid cell. Ordered lexicographically by (y, x) so that every container of
// cells iterates in the same deterministic order.
struct Cell {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(const Cell&, const Cell&) = default;
    friend constexpr std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }

    constexpr Cell operator+(Offset o) const { return {x + o.dx, y + o.dy}; }
    constexpr Cell operator-(Offset o) const { return {x - o.dx, y - o.dy}; }
    constexpr Offset operator-(Cell o) const { return {x - o.x, y - o.y}; }
};

// 4-neighbours in (y, x) order.
inline constexpr std::array<Offset, 4> kNeighbours{{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};

constexpr int manhattan(Cell a, Cell b) {
    return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

constexpr bool adjacent(Cell a, Cell b) { return manhattan(a, b) == 1; }

std::string to_string(Cell c);

struct CellHash {
    std::size_t operator()(Cell c) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t(std::uint32_t(c.x)) << 32) | std::uint32_t(c.y));
    }
};

inline constexpr int kRotorsPerUnit = 4;
using RotorMask = std::bitset<kRotorsPerUnit>;  // set bit = dead rotor

class FaultState {
public:
    enum class Kind { Healthy, RotorFault, UnitFault };

    constexpr FaultState() = default;

    static constexpr FaultState healthy() { return {}; }
    static FaultState rotor_fault(int rotor_index);
    static constexpr FaultState unit_fault() { return FaultState(Kind::UnitFault, 0); }

    constexpr Kind kind() const { return kind_; }
    constexpr int rotor_index() const { return rotor_; }
    constexpr bool is_faulty() const { return kind_ != Kind::Healthy; }

    RotorMask dead_rotors() const;

    friend constexpr bool operator==(const FaultState&, const FaultState&) = default;
    friend constexpr auto operator<=>(const FaultState&, const FaultState&) = default;

private:
    constexpr FaultState(Kind k, int r) : kind_(k), rotor_(r) {}

    Kind kind_ = Kind::Healthy;
    int rotor_ = 0;  // meaningful only for RotorFault
};

std::string to_string(const FaultState& s);

}  // namespace mars
