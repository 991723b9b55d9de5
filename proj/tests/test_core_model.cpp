#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mars/error.hpp"
#include "oracles.hpp"

using namespace mars;
using testing::make;
using testing::rect;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("cells order by row, then column") {
    CHECK(Cell{5, 0} < Cell{0, 1});
    CHECK(Cell{0, 1} < Cell{1, 1});
    const auto cells = rect(2, 2).cells();
    CHECK(cells == std::vector<Cell>{{0, 0}, {1, 0}, {0, 1}, {1, 1}});
}

TEST_CASE("fault states") {
    CHECK(FaultState::healthy().dead_rotors().none());
    CHECK(FaultState::unit_fault().dead_rotors().all());
    CHECK(FaultState::rotor_fault(2).dead_rotors().count() == 1);
    CHECK(FaultState::rotor_fault(2).dead_rotors().test(2));
    CHECK(code_of([] { (void)FaultState::rotor_fault(4); }) == ErrorCode::InvalidInput);
    CHECK(code_of([] { (void)FaultState::rotor_fault(-1); }) == ErrorCode::InvalidInput);
}

TEST_CASE("duplicate cells are rejected") {
    const std::pair<Cell, FaultState> units[] = {{{0, 0}, FaultState::healthy()}, {{0, 0}, FaultState::unit_fault()}};
    CHECK(code_of([&] { (void)Configuration::from_units(units); }) == ErrorCode::InvalidInput);
}

TEST_CASE("partition") {
    SUBCASE("3x2 block is one subassembly of six") {
        const auto parts = partition(rect(3, 2));
        REQUIRE(parts.size() == 1);
        CHECK(parts[0].cells().size() == 6);
    }
    SUBCASE("diagonal neighbours do not connect") {
        const auto parts = partition(make({{0, 0}, {2, 0}}));
        REQUIRE(parts.size() == 2);
        CHECK(parts[0].cells() == std::vector<Cell>{{0, 0}});
        CHECK(parts[1].cells() == std::vector<Cell>{{2, 0}});
        CHECK(partition(make({{0, 0}, {1, 1}})).size() == 2);
    }
    SUBCASE("heart footprint is connected") {
        const auto heart = Configuration::healthy(testing::heart_cells());
        const auto parts = partition(heart);
        REQUIRE(parts.size() == 1);
        CHECK(parts[0].cells().size() == 11);
    }
    SUBCASE("fault states follow their cells") {
        const auto parts = partition(make({{0, 0}, {1, 0}, {3, 0}}, {{3, 0}}));
        REQUIRE(parts.size() == 2);
        CHECK_FALSE(parts[0].has_fault());
        CHECK(parts[1].has_fault());
    }
    SUBCASE("empty") { CHECK(partition(Configuration{}).empty()); }
}

TEST_CASE("detach and attach") {
    const auto block = rect(3, 2);
    SUBCASE("corner of 3x2 leaves a connected L") {
        const auto l = block.detach({2, 0});
        CHECK(l.size() == 5);
        CHECK(partition(l).size() == 1);
        CHECK_FALSE(l.occupied({2, 0}));
    }
    SUBCASE("centre of a plus leaves four arms") {
        const auto plus = make({{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}});
        CHECK(partition(plus.detach({1, 1})).size() == 4);
    }
    SUBCASE("detach then attach restores the configuration") {
        const auto faulty = rect(3, 2, {{1, 1}});
        CHECK(faulty.detach({1, 1}).attach({1, 1}, FaultState::unit_fault()) == faulty);
        CHECK(block.detach({0, 0}).attach({0, 0}, FaultState::healthy()) == block);
    }
    SUBCASE("errors") {
        CHECK(code_of([&] { (void)block.detach({5, 5}); }) == ErrorCode::CellNotOccupied);
        CHECK(code_of([&] { (void)block.attach({0, 0}, FaultState::healthy()); }) == ErrorCode::CellOccupied);
    }
    SUBCASE("values are immutable") {
        const auto copy = block;
        (void)block.detach({0, 0});
        CHECK(block == copy);
    }
}

TEST_CASE("translate_set") {
    const auto domino = make({{0, 0}, {1, 0}});
    const Cell both[] = {{0, 0}, {1, 0}};
    SUBCASE("into free space") {
        CHECK(domino.translate_set(both, {1, 0}) == make({{1, 0}, {2, 0}}));
        CHECK(domino.translate_set(both, {0, 3}) == make({{0, 3}, {1, 3}}));
    }
    SUBCASE("zero offset is the identity") { CHECK(domino.translate_set(both, {0, 0}) == domino); }
    SUBCASE("onto a stationary unit") {
        const auto crowded = make({{0, 0}, {1, 0}, {2, 0}});
        CHECK(code_of([&] { (void)crowded.translate_set(both, {1, 0}); }) == ErrorCode::DestinationCollision);
    }
    SUBCASE("vacant mover") {
        const Cell ghost[] = {{7, 7}};
        CHECK(code_of([&] { (void)domino.translate_set(ghost, {1, 0}); }) == ErrorCode::CellNotOccupied);
    }
    SUBCASE("states travel with the units") {
        const auto f = make({{0, 0}, {1, 0}}, {{0, 0}});
        const Cell first[] = {{0, 0}};
        const auto moved = f.translate_set(first, {0, 1});
        CHECK(moved.state({0, 1}) == FaultState::unit_fault());
        CHECK(moved.state({1, 0}) == FaultState::healthy());
    }
}

TEST_CASE("normalize and bounding box") {
    const Cell cells[] = {{3, 5}, {4, 5}, {3, 6}};
    CHECK(normalize(cells) == std::vector<Cell>{{0, 0}, {1, 0}, {0, 1}});
    const auto box = bounding_box(cells);
    CHECK(box.width() == 2);
    CHECK(box.height() == 2);
    CHECK(box.inflated(2).contains({1, 3}));
    CHECK_FALSE(box.inflated(2).contains({0, 3}));
}

TEST_CASE("property: partition agrees with a flood-fill oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const int w = std::uniform_int_distribution<int>(1, 7)(rng);
        const int h = std::uniform_int_distribution<int>(1, 7)(rng);
        std::vector<Cell> cells;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (std::bernoulli_distribution(0.55)(rng)) cells.push_back({x, y});
        const auto config = Configuration::healthy(cells);
        std::vector<std::vector<Cell>> got;
        std::size_t total = 0;
        for (const auto& p : partition(config)) {
            got.push_back(p.cells());
            total += p.cells().size();
        }
        CHECK(got == oracle::components(cells));
        CHECK(total == cells.size());
        // Components arrive ordered by their minimal cell.
        for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].front() < got[i].front());
    }
}

TEST_CASE("property: translation is invertible and keeps the unit count") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cells = testing::random_footprint(rng, std::uniform_int_distribution<int>(1, 9)(rng));
        const auto config = Configuration::healthy(cells);
        const Offset d{std::uniform_int_distribution<int>(-20, 20)(rng), std::uniform_int_distribution<int>(-20, 20)(rng)};
        const auto moved = config.translate_set(cells, d);
        CHECK(moved.size() == config.size());
        std::vector<Cell> back;
        for (Cell c : moved.cells()) back.push_back(c);
        CHECK(moved.translate_set(back, Offset{-d.dx, -d.dy}) == config);
        CHECK(normalize(moved.cells()) == normalize(cells));
    }
}
