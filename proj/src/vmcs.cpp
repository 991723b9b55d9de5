#include "mars/vmcs.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mars/assignment.hpp"
#include "mars/error.hpp"

namespace mars {

namespace {

constexpr double kCmQuantum = 1e-12;
constexpr int kHelperCap = 8;

long long cm_key(double cm) {
    if (!std::isfinite(cm)) return cm > 0 ? std::numeric_limits<long long>::max() : std::numeric_limits<long long>::min();
    return std::llround(cm / kCmQuantum);
}

bool nearly_equal(double a, double b, double rel) {
    if (a == b) return true;
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::vector<std::pair<Cell, Cell>> match_faults(const Configuration& from, const Configuration& to) {
    std::vector<std::pair<Cell, Cell>> pairs;
    const auto src = from.faulty_cells();
    const auto dst = to.faulty_cells();
    if (src.size() != dst.size()) throw Error(ErrorCode::InvalidInput, "fault counts differ");
    if (src.empty()) return pairs;
    CostMatrix cost(src.size(), std::vector<std::int64_t>(dst.size(), kNoEdge));
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = 0; j < dst.size(); ++j)
            if (from.state(src[i]) == to.state(dst[j])) cost[i][j] = manhattan(src[i], dst[j]);
    const auto solution = solve_assignment(cost);
    if (!solution) throw Error(ErrorCode::InvalidInput, "fault multisets differ");
    for (std::size_t i = 0; i < src.size(); ++i)
        pairs.emplace_back(src[i], dst[static_cast<std::size_t>(solution->column_of_row[i])]);
    return pairs;
}

int fault_displacement(const Configuration& from, const Configuration& to) {
    int total = 0;
    for (const auto& [a, b] : match_faults(from, to)) total += manhattan(a, b);
    return total;
}

std::vector<Configuration> fault_placements(std::span<const Cell> footprint, std::span<const FaultState> faults) {
    std::vector<Cell> cells(footprint.begin(), footprint.end());
    std::sort(cells.begin(), cells.end());
    std::vector<FaultState> kinds(faults.begin(), faults.end());
    std::sort(kinds.begin(), kinds.end());
    const std::size_t n = cells.size();
    const std::size_t r = kinds.size();
    std::vector<Configuration> out;
    if (r > n) return out;

    std::vector<std::size_t> pick(r);
    for (std::size_t i = 0; i < r; ++i) pick[i] = i;
    while (true) {
        auto arrangement = kinds;
        do {
            Configuration::Units units;
            for (Cell c : cells) units.emplace(c, FaultState::healthy());
            for (std::size_t i = 0; i < r; ++i) units[cells[pick[i]]] = arrangement[i];
            out.emplace_back(std::move(units));
        } while (std::next_permutation(arrangement.begin(), arrangement.end()));

        // Next r-combination in lexicographic order.
        std::size_t i = r;
        while (i > 0 && pick[i - 1] == n - r + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < r; ++j) pick[j] = pick[j - 1] + 1;
    }
    return out;
}

// n^2 times the sum of squared distances from the faulty cells to the
// footprint centroid; exact in integers.
long long fault_spread(const Configuration& config) {
    long long n = 0, sx = 0, sy = 0;
    for (const auto& [c, s] : config.units()) {
        ++n;
        sx += c.x;
        sy += c.y;
    }
    long long total = 0;
    for (Cell f : config.faulty_cells()) {
        const long long dx = n * f.x - sx;
        const long long dy = n * f.y - sy;
        total += dx * dx + dy * dy;
    }
    return total;
}

TargetConfiguration optimal_configuration(const Configuration& config, const CmEvaluator& cm,
                                          const OptimalConfigurationOptions& options) {
    if (config.empty()) throw Error(ErrorCode::InvalidInput, "empty configuration");
    const auto faults = config.fault_multiset();
    if (faults.empty()) return {config, kFaultFree};

    // Secondary keys, smaller is better; placements arrive in lexicographic
    // order so the first of equals wins.
    auto secondary = [&](const Configuration& candidate) {
        return std::pair{options.prefer_central_faults ? fault_spread(candidate) : 0LL,
                         options.prefer_least_displacement ? fault_displacement(config, candidate) : 0};
    };
    const auto footprint = config.cells();
    std::optional<TargetConfiguration> best;
    std::pair<long long, int> best_key;
    for (auto& candidate : fault_placements(footprint, faults)) {
        const double value = cm.system(candidate);
        if (best && nearly_equal(value, best->cm, options.tie_tolerance)) {
            auto key = secondary(candidate);
            if (key < best_key) {
                best_key = key;
                best = TargetConfiguration{std::move(candidate), value};
            }
        } else if (!best || value > best->cm) {
            best_key = secondary(candidate);
            best = TargetConfiguration{std::move(candidate), value};
        }
    }
    return *best;
}

TargetConfiguration optimal_configuration(const Configuration& config, const PhysicalParams& params) {
    CmEvaluator cm(params);
    return optimal_configuration(config, cm);
}

std::vector<std::vector<Cell>> enumerate_connected_shapes(std::span<const Cell> anchor, int k) {
    if (k < 0) throw Error(ErrorCode::InvalidInput, "negative helper count");
    std::vector<Cell> seed(anchor.begin(), anchor.end());
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    if (seed.empty()) throw Error(ErrorCode::InvalidInput, "empty anchor");

    std::set<std::vector<Cell>> level{seed};
    for (int step = 0; step < k; ++step) {
        std::set<std::vector<Cell>> next;
        for (const auto& shape : level) {
            for (Cell c : shape) {
                for (Offset o : kNeighbours) {
                    const Cell n = c + o;
                    if (std::binary_search(shape.begin(), shape.end(), n)) continue;
                    auto grown = shape;
                    grown.insert(std::upper_bound(grown.begin(), grown.end(), n), n);
                    next.insert(std::move(grown));
                }
            }
        }
        level = std::move(next);
    }
    std::vector<std::vector<Cell>> out;
    for (const auto& shape : level)
        if (is_connected(shape)) out.push_back(shape);
    return out;
}

std::vector<VmcsSpec> controllable_shapes(std::span<const FaultyUnit> group, int k, const CmEvaluator& cm,
                                          double epsilon) {
    if (group.empty()) throw Error(ErrorCode::InvalidInput, "empty faulty group");
    std::vector<FaultyUnit> units(group.begin(), group.end());
    std::sort(units.begin(), units.end(), [](const auto& a, const auto& b) { return a.cell < b.cell; });
    const Offset to_local = Cell{0, 0} - units.front().cell;

    std::vector<Cell> anchor;
    std::vector<FaultState> states;
    for (const auto& u : units) {
        if (!u.state.is_faulty()) throw Error(ErrorCode::InvalidInput, "group member " + to_string(u.cell) + " is healthy");
        anchor.push_back(u.cell + to_local);
        states.push_back(u.state);
    }

    std::vector<VmcsSpec> specs;
    for (auto& shape : enumerate_connected_shapes(anchor, k)) {
        Configuration::Units map;
        for (Cell c : shape) map.emplace(c, FaultState::healthy());
        for (std::size_t i = 0; i < anchor.size(); ++i) map[anchor[i]] = states[i];
        const double value = cm.subassembly(Subassembly{Configuration(std::move(map))});
        if (value < epsilon) continue;
        specs.push_back(VmcsSpec{std::move(shape), anchor, states, k, value});
    }
    std::stable_sort(specs.begin(), specs.end(),
                     [](const VmcsSpec& a, const VmcsSpec& b) { return cm_key(a.cm) > cm_key(b.cm); });
    return specs;
}

std::vector<VmcsSpec> vmcs_candidates(std::span<const FaultyUnit> group, const CmEvaluator& cm,
                                      const VmcsOptions& options) {
    const int cap = options.max_helpers >= 0 ? options.max_helpers : kHelperCap;
    for (int k = 0; k <= cap; ++k) {
        auto specs = controllable_shapes(group, k, cm, options.epsilon);
        if (!specs.empty()) return specs;
    }
    throw Error(ErrorCode::UnboundedGrowth,
                "no controllable subassembly with at most " + std::to_string(cap) + " helpers");
}

VmcsSpec identify_vmcs(std::span<const FaultyUnit> group, const CmEvaluator& cm, const VmcsOptions& options) {
    return vmcs_candidates(group, cm, options).front();
}

VmcsSpec identify_vmcs(std::span<const FaultyUnit> group, const PhysicalParams& params, const VmcsOptions& options) {
    CmEvaluator cm(params);
    return identify_vmcs(group, cm, options);
}

VmcsPlacement place(const VmcsSpec& spec, Cell faulty_anchor) {
    const Offset shift = faulty_anchor - spec.faulty_local.front();
    VmcsPlacement p;
    for (Cell c : spec.footprint) p.footprint.push_back(c + shift);
    for (Cell c : spec.faulty_local) p.faulty.push_back(c + shift);
    std::sort(p.footprint.begin(), p.footprint.end());
    std::sort(p.faulty.begin(), p.faulty.end());
    return p;
}

std::vector<DonorChoice> plan_vmcs_completion(const Configuration& config, const TargetConfiguration& target,
                                              const VmcsPlacement& placement, const CmEvaluator& cm,
                                              const DonorOptions& options) {
    std::set<Cell> reserved(options.reserved.begin(), options.reserved.end());
    reserved.insert(placement.footprint.begin(), placement.footprint.end());
    for (Cell f : placement.faulty)
        if (!config.occupied(f) || !config.state(f).is_faulty())
            throw Error(ErrorCode::InvalidInput, "placement is not anchored on a faulty unit at " + to_string(f));

    std::vector<Cell> arena_cells = placement.footprint;
    for (Cell c : target.config.cells()) arena_cells.push_back(c);

    std::vector<DonorChoice> moves;
    Configuration work = config;
    for (Cell vacancy : placement.footprint) {
        if (work.occupied(vacancy)) {
            if (work.state(vacancy).is_faulty() &&
                !std::binary_search(placement.faulty.begin(), placement.faulty.end(), vacancy))
                throw PlanningError(ErrorCode::NoFeasibleDonor, "vmcs-build", to_string(vacancy),
                                    "placement overlaps another faulty unit");
            continue;
        }
        const auto arena = planning_arena(work, arena_cells);
        // A detach may not push a controllable system below the floor. An
        // assembly already below it has no margin to protect.
        const bool guard_detach = cm.system(work) >= options.epsilon;
        std::optional<DonorChoice> best;
        for (const auto& [donor, state] : work.units()) {
            if (state.is_faulty() || reserved.contains(donor)) continue;
            const Configuration detached = work.detach(donor);
            const double detached_cm = cm.system(detached);
            if (guard_detach && detached_cm < options.epsilon) continue;
            GridPath path;
            try {
                path = astar_unit(work, donor, vacancy, arena);
            } catch (const NoPathError&) {
                continue;
            }
            const Configuration arrived = detached.attach(vacancy, FaultState::healthy());
            if (cm.system(arrived) < options.epsilon) continue;
            const double delta = detached_cm - target.cm;
            const double objective = options.c1 * delta * delta - options.c2 * path.length();
            if (!best || objective < best->objective) {
                best = DonorChoice{donor, vacancy, std::move(path), objective, detached_cm};
            }
        }
        if (!best)
            throw PlanningError(ErrorCode::NoFeasibleDonor, "vmcs-build", to_string(vacancy),
                                "every candidate donor is unreachable or breaks controllability");
        work = work.detach(best->donor).attach(vacancy, FaultState::healthy());
        moves.push_back(std::move(*best));
    }
    return moves;
}

}  // namespace mars
