#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mars/error.hpp"
#include "mars/vmcs.hpp"
#include "oracles.hpp"

using namespace mars;
using testing::make;
using testing::rect;

namespace {

const PhysicalParams kDefaults;

// Smallest k for which some connected shape around the group reaches CM >= 0,
// found by growing every superset of the anchor.
std::pair<int, double> oracle_vmcs(const std::vector<std::pair<Cell, FaultState>>& group) {
    std::vector<Cell> anchor;
    for (const auto& [c, s] : group) anchor.push_back(c);
    for (int k = 0; k <= 6; ++k) {
        double best = -kFaultFree;
        for (const auto& shape : oracle::grow_shapes(anchor, k)) {
            Configuration::Units units;
            for (Cell c : shape) units.emplace(c, FaultState::healthy());
            for (const auto& [c, s] : group) units[c] = s;
            best = std::max(best, subassembly_cm(Subassembly{Configuration(units)}, kDefaults));
        }
        if (best >= 0) return {k, best};
    }
    return {-1, 0};
}

}  // namespace

TEST_CASE("connected shape enumeration") {
    const Cell origin[] = {{0, 0}};
    SUBCASE("k = 0 is the anchor itself") {
        const auto shapes = enumerate_connected_shapes(origin, 0);
        REQUIRE(shapes.size() == 1);
        CHECK(shapes[0] == std::vector<Cell>{{0, 0}});
    }
    SUBCASE("k = 1 gives the four dominoes") { CHECK(enumerate_connected_shapes(origin, 1).size() == 4); }
    SUBCASE("k = 1..4 match brute-force growth") {
        for (int k = 1; k <= 4; ++k) {
            const auto got = enumerate_connected_shapes(origin, k);
            const auto want = oracle::grow_shapes({{0, 0}}, k);
            CHECK(got.size() == want.size());
            CHECK(std::set<std::vector<Cell>>(got.begin(), got.end()) == want);
        }
        // Frozen from the oracle.
        CHECK(enumerate_connected_shapes(origin, 2).size() == 18);
        CHECK(enumerate_connected_shapes(origin, 3).size() == 76);
    }
    SUBCASE("canonical order and connectivity") {
        const auto shapes = enumerate_connected_shapes(origin, 3);
        CHECK(std::is_sorted(shapes.begin(), shapes.end()));
        for (const auto& s : shapes) CHECK(is_connected(s));
    }
    SUBCASE("two-cell anchors, including disjoint ones") {
        const Cell pair[] = {{0, 0}, {1, 0}};
        CHECK(enumerate_connected_shapes(pair, 2).size() == oracle::grow_shapes({{0, 0}, {1, 0}}, 2).size());
        const Cell gap[] = {{0, 0}, {2, 0}};
        const auto bridged = enumerate_connected_shapes(gap, 1);
        REQUIRE(bridged.size() == 1);
        CHECK(bridged[0] == std::vector<Cell>{{0, 0}, {1, 0}, {2, 0}});
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(enumerate_connected_shapes(origin, -1), Error);
        CHECK_THROWS_AS(enumerate_connected_shapes(std::span<const Cell>{}, 1), Error);
    }
}

TEST_CASE("VMCS identification") {
    SUBCASE("unit fault needs two helpers; the fault sits in the middle of an I-tromino") {
        const FaultyUnit u{{4, 7}, FaultState::unit_fault()};
        const auto v = identify_vmcs(std::span(&u, 1), kDefaults);
        const auto [k, cm] = oracle_vmcs({{u.cell, u.state}});
        CHECK(k == 2);
        CHECK(v.k == k);
        CHECK(v.cm == doctest::Approx(cm).epsilon(1e-9));
        CHECK(v.cm > 0);
        const auto placed = place(v, u.cell);
        const bool horizontal = placed.footprint == std::vector<Cell>{{3, 7}, {4, 7}, {5, 7}};
        const bool vertical = placed.footprint == std::vector<Cell>{{4, 6}, {4, 7}, {4, 8}};
        CHECK((horizontal || vertical));
        CHECK(placed.faulty == std::vector<Cell>{{4, 7}});
    }
    SUBCASE("rotor fault") {
        for (int r = 0; r < kRotorsPerUnit; ++r) {
            const FaultyUnit u{{0, 0}, FaultState::rotor_fault(r)};
            const auto [k, cm] = oracle_vmcs({{u.cell, u.state}});
            const auto v = identify_vmcs(std::span(&u, 1), kDefaults);
            CHECK(v.k == k);
            CHECK(v.cm == doctest::Approx(cm).epsilon(1e-9));
            CHECK(v.k <= 1);
        }
    }
    SUBCASE("grouped adjacent unit faults share helpers") {
        const FaultyUnit pair[] = {{{0, 0}, FaultState::unit_fault()}, {{1, 0}, FaultState::unit_fault()}};
        const auto grouped = identify_vmcs(pair, kDefaults);
        const auto a = identify_vmcs(std::span(&pair[0], 1), kDefaults);
        const auto b = identify_vmcs(std::span(&pair[1], 1), kDefaults);
        CHECK(grouped.k <= a.k + b.k);
        CHECK(grouped.k == oracle_vmcs({{pair[0].cell, pair[0].state}, {pair[1].cell, pair[1].state}}).first);
    }
    SUBCASE("candidates come best first and the first one is the VMCS") {
        const FaultyUnit u{{0, 0}, FaultState::unit_fault()};
        const CmEvaluator cm(kDefaults);
        const auto all = vmcs_candidates(std::span(&u, 1), cm);
        REQUIRE_FALSE(all.empty());
        for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].cm >= all[i].cm - 1e-12);
        CHECK(all.front().footprint == identify_vmcs(std::span(&u, 1), cm).footprint);
        for (const auto& s : all) CHECK(s.cm >= 0);
    }
    SUBCASE("helper budget") {
        const FaultyUnit u{{0, 0}, FaultState::unit_fault()};
        CHECK_THROWS_AS(identify_vmcs(std::span(&u, 1), kDefaults, {0.0, 1}), Error);
        CHECK_THROWS_AS(identify_vmcs(std::span<const FaultyUnit>{}, kDefaults), Error);
        const FaultyUnit healthy{{0, 0}, FaultState::healthy()};
        CHECK_THROWS_AS(identify_vmcs(std::span(&healthy, 1), kDefaults), Error);
    }
    SUBCASE("a higher floor can only grow the shape") {
        const FaultyUnit u{{0, 0}, FaultState::unit_fault()};
        const auto base = identify_vmcs(std::span(&u, 1), kDefaults);
        const auto strict = identify_vmcs(std::span(&u, 1), kDefaults, {base.cm * 2, -1});
        CHECK(strict.k > base.k);
        CHECK(strict.cm >= base.cm * 2);
    }
}

TEST_CASE("optimal configuration") {
    const CmEvaluator cm(kDefaults);
    SUBCASE("fault-free input comes back unchanged") {
        const auto t = optimal_configuration(rect(3, 2), cm);
        CHECK(t.config == rect(3, 2));
        CHECK(t.cm == kFaultFree);
    }
    SUBCASE("domino: symmetric placements resolve to the smaller cell") {
        const auto t = optimal_configuration(make({{0, 0}, {1, 0}}, {{1, 0}}), cm);
        CHECK(t.config.faulty_cells() == std::vector<Cell>{{0, 0}});
    }
    SUBCASE("3x3 with one unit fault: exhaustive check from every start") {
        // Independent re-evaluation of all nine placements.
        double best = -kFaultFree;
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x) best = std::max(best, system_cm(rect(3, 3, {{x, y}}), kDefaults));
        std::optional<Configuration> first;
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x) {
                const auto t = optimal_configuration(rect(3, 3, {{x, y}}), cm);
                CHECK(t.cm == doctest::Approx(best).epsilon(1e-12));
                CHECK(system_cm(t.config, kDefaults) == doctest::Approx(best).epsilon(1e-12));
                if (!first) first = t.config;
                CHECK(t.config == *first);  // independent of where the fault started
            }
        // The centre is the most central cell and wins the tie.
        CHECK(first->faulty_cells() == std::vector<Cell>{{1, 1}});
    }
    SUBCASE("the footprint and fault multiset are preserved") {
        Configuration::Units u;
        for (Cell c : testing::heart_cells()) u.emplace(c, FaultState::healthy());
        u[{0, 1}] = FaultState::unit_fault();
        u[{4, 1}] = FaultState::rotor_fault(2);
        const Configuration heart(u);
        const auto t = optimal_configuration(heart, cm);
        CHECK(t.config.cells() == heart.cells());
        CHECK(t.config.fault_multiset() == heart.fault_multiset());
        CHECK(t.cm >= system_cm(heart, kDefaults));
    }
    SUBCASE("3x2 with two unit faults: middle column and opposite corners tie") {
        const auto start = rect(3, 2, {{0, 1}, {1, 1}});
        const double column = system_cm(rect(3, 2, {{1, 0}, {1, 1}}), kDefaults);
        const double corners = system_cm(rect(3, 2, {{0, 0}, {2, 1}}), kDefaults);
        CHECK(column == doctest::Approx(corners).epsilon(1e-9));

        const auto central = optimal_configuration(start, cm);
        CHECK(central.config.faulty_cells() == std::vector<Cell>{{1, 0}, {1, 1}});
        CHECK(central.cm == doctest::Approx(column).epsilon(1e-12));

        OptimalConfigurationOptions plain;
        plain.prefer_central_faults = false;
        const auto lexicographic = optimal_configuration(start, cm, plain);
        CHECK(lexicographic.config.faulty_cells() == std::vector<Cell>{{0, 0}, {2, 1}});
    }
    SUBCASE("empty input") { CHECK_THROWS_AS(optimal_configuration(Configuration{}, cm), Error); }
}

TEST_CASE("fault bookkeeping") {
    SUBCASE("placements enumerate every arrangement once") {
        const Cell cells[] = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
        const FaultState two_units[] = {FaultState::unit_fault(), FaultState::unit_fault()};
        CHECK(fault_placements(cells, two_units).size() == 6);
        const FaultState mixed[] = {FaultState::unit_fault(), FaultState::rotor_fault(0)};
        CHECK(fault_placements(cells, mixed).size() == 12);
    }
    SUBCASE("matching respects fault kinds") {
        Configuration::Units a{{{0, 0}, FaultState::unit_fault()}, {{1, 0}, FaultState::rotor_fault(1)},
                               {{2, 0}, FaultState::healthy()}};
        Configuration::Units b{{{0, 0}, FaultState::rotor_fault(1)}, {{1, 0}, FaultState::healthy()},
                               {{2, 0}, FaultState::unit_fault()}};
        const auto pairs = match_faults(Configuration(a), Configuration(b));
        REQUIRE(pairs.size() == 2);
        CHECK(pairs[0] == std::pair{Cell{0, 0}, Cell{2, 0}});
        CHECK(pairs[1] == std::pair{Cell{1, 0}, Cell{0, 0}});
        CHECK(fault_displacement(Configuration(a), Configuration(b)) == 3);
    }
    SUBCASE("spread is zero at the centroid and grows outwards") {
        CHECK(fault_spread(rect(3, 3, {{1, 1}})) == 0);
        CHECK(fault_spread(rect(3, 3, {{0, 0}})) > fault_spread(rect(3, 3, {{1, 0}})));
        // n = 9, offsets (-9, -9): 81 + 81.
        CHECK(fault_spread(rect(3, 3, {{0, 0}})) == 162);
    }
}

TEST_CASE("VMCS completion") {
    const CmEvaluator cm(kDefaults);
    SUBCASE("complete placement needs no donors") {
        const auto config = rect(3, 2, {{1, 0}});
        const auto target = optimal_configuration(config, cm);
        const VmcsPlacement p{{{0, 0}, {1, 0}, {2, 0}}, {{1, 0}}};
        CHECK(plan_vmcs_completion(config, target, p, cm, {}).empty());
    }
    SUBCASE("donors fill every vacancy and keep the floor") {
        const auto config = rect(3, 3, {{0, 0}});
        const auto target = optimal_configuration(config, cm);
        const VmcsPlacement p{{{-1, 0}, {0, 0}, {1, 0}}, {{0, 0}}};
        const auto moves = plan_vmcs_completion(config, target, p, cm, {});
        REQUIRE(moves.size() == 1);
        CHECK(moves[0].vacancy == Cell{-1, 0});
        CHECK(moves[0].path.goal() == Cell{-1, 0});
        CHECK(moves[0].path.start() == moves[0].donor);
        const auto after = config.detach(moves[0].donor).attach({-1, 0}, FaultState::healthy());
        CHECK(cm.system(after) >= 0);
    }
    SUBCASE("reserved cells never donate") {
        const auto config = rect(3, 3, {{0, 0}});
        const auto target = optimal_configuration(config, cm);
        const VmcsPlacement p{{{-1, 0}, {0, 0}, {1, 0}}, {{0, 0}}};
        const auto free_choice = plan_vmcs_completion(config, target, p, cm, {});
        DonorOptions opts;
        opts.reserved = {free_choice[0].donor};
        const auto moves = plan_vmcs_completion(config, target, p, cm, opts);
        REQUIRE(moves.size() == 1);
        CHECK(moves[0].donor != free_choice[0].donor);
    }
    SUBCASE("placement must be anchored on a faulty unit") {
        const auto config = rect(3, 3, {{0, 0}});
        const auto target = optimal_configuration(config, cm);
        const VmcsPlacement p{{{0, 1}, {1, 1}, {2, 1}}, {{1, 1}}};
        CHECK_THROWS_AS(plan_vmcs_completion(config, target, p, cm, {}), Error);
    }
    SUBCASE("equal objectives resolve to the smaller donor cell") {
        // With both weights at zero every candidate ties.
        const auto config = make({{1, 0}, {0, 1}, {1, 1}, {2, 1}}, {{1, 0}});
        const auto target = optimal_configuration(config, cm);
        const VmcsPlacement p{{{0, 0}, {1, 0}, {2, 0}}, {{1, 0}}};
        DonorOptions opts;
        opts.c1 = 0;
        opts.c2 = 0;  // every candidate ties
        opts.epsilon = -kFaultFree;
        const auto moves = plan_vmcs_completion(config, target, p, cm, opts);
        REQUIRE(moves.size() == 2);
        CHECK(moves[0].vacancy == Cell{0, 0});
        CHECK(moves[0].donor == Cell{0, 1});
    }
}
