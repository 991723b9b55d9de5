#include "mars/planner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <set>
#include <sstream>

#include "mars/assignment.hpp"
#include "mars/error.hpp"

namespace mars {

std::string_view to_string(StepKind kind) {
    return kind == StepKind::MoveUnit ? "move_unit" : "move_subassembly";
}

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::VmcsBuild: return "vmcs_build";
        case Phase::PathClearance: return "path_clearance";
        case Phase::VmcsTransfer: return "vmcs_transfer";
        case Phase::FillRemainder: return "fill_remainder";
    }
    return "?";
}

std::optional<StepKind> parse_step_kind(std::string_view text) {
    if (text == "move_unit") return StepKind::MoveUnit;
    if (text == "move_subassembly") return StepKind::MoveSubassembly;
    return std::nullopt;
}

std::optional<Phase> parse_phase(std::string_view text) {
    for (Phase p : {Phase::VmcsBuild, Phase::PathClearance, Phase::VmcsTransfer, Phase::FillRemainder})
        if (to_string(p) == text) return p;
    return std::nullopt;
}

PlanSummary Plan::summary() const {
    PlanSummary s;
    s.step_count = static_cast<int>(steps.size());
    s.detach_attach_count = 2 * s.step_count;
    for (const auto& step : steps) {
        s.total_path_length += step.path.length();
        s.min_cm = std::min(s.min_cm, step.post_cm);
    }
    if (steps.empty()) s.min_cm = target.cm;
    s.target_config = target.config;
    return s;
}

namespace {

std::set<Cell> target_cells(const TargetConfiguration& target) {
    const auto cells = target.config.cells();
    return {cells.begin(), cells.end()};
}

BoundingBox arena_for(const Configuration& config, const TargetConfiguration& target,
                      std::span<const Cell> extra = {}) {
    auto cells = target.config.cells();
    cells.insert(cells.end(), extra.begin(), extra.end());
    return planning_arena(config, cells);
}

// Applies one relocation, gating both the in-flight and the landed state.
PlanStep execute(Configuration& config, const PlannerContext& ctx, StepKind kind, Phase phase,
                 std::vector<Cell> moving, Cell reference, GridPath path) {
    std::sort(moving.begin(), moving.end());
    const double transit = ctx.cm.in_transit(config, moving);
    Configuration next = config.translate_set(moving, path.goal() - reference);
    const double post = ctx.cm.system(next);
    const double floor = ctx.options.epsilon;
    if ((ctx.options.gate_in_transit && transit < floor) || post < floor) {
        std::ostringstream msg;
        msg << "controllability margin would drop below " << floor << " (in flight " << transit << ", landed "
            << post << ")";
        throw PlanningError(ErrorCode::UnsafeStep, std::string(to_string(phase)), to_string(reference), msg.str());
    }
    PlanStep step{kind, phase, std::move(moving), reference, std::move(path), next, post, transit, false};
    config = std::move(next);
    return step;
}

bool unit_move_is_safe(const Configuration& config, const PlannerContext& ctx, Cell from, Cell to) {
    const Configuration lifted = config.detach(from);
    if (ctx.options.gate_in_transit && ctx.cm.system(lifted) < ctx.options.epsilon) return false;
    return ctx.cm.system(lifted.attach(to, config.state(from))) >= ctx.options.epsilon;
}

struct Selection {
    VmcsTransfer transfer;
    VmcsPlacement build;
    VmcsPlacement landing;
};

// Faulty units that travel together: their targets are 4-adjacent and they
// already sit in the same relative arrangement, so one rigid VMCS carries all.
struct MoverGroup {
    std::vector<Cell> current;  // sorted
    std::vector<Cell> goals;    // goals[i] belongs to current[i]
};

std::vector<MoverGroup> group_movers(std::vector<std::pair<Cell, Cell>> movers, bool merge_adjacent) {
    std::sort(movers.begin(), movers.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    std::vector<int> group(movers.size());
    for (std::size_t i = 0; i < movers.size(); ++i) group[i] = static_cast<int>(i);
    auto find = [&](int i) {
        while (group[static_cast<std::size_t>(i)] != i) i = group[static_cast<std::size_t>(i)];
        return i;
    };
    for (std::size_t i = 0; i < movers.size(); ++i)
        for (std::size_t j = i + 1; j < movers.size(); ++j) {
            const auto& [ci, gi] = movers[i];
            const auto& [cj, gj] = movers[j];
            if (merge_adjacent && adjacent(gi, gj) && gj - gi == cj - ci) group[static_cast<std::size_t>(find(static_cast<int>(j)))] = find(static_cast<int>(i));
        }
    std::map<int, MoverGroup> by_root;
    for (std::size_t i = 0; i < movers.size(); ++i) {
        auto& g = by_root[find(static_cast<int>(i))];
        g.current.push_back(movers[i].first);
        g.goals.push_back(movers[i].second);
    }
    std::vector<MoverGroup> out;
    for (auto& [root, g] : by_root) {
        std::vector<std::size_t> order(g.current.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g.current[a] < g.current[b]; });
        MoverGroup sorted;
        for (std::size_t i : order) {
            sorted.current.push_back(g.current[i]);
            sorted.goals.push_back(g.goals[i]);
        }
        out.push_back(std::move(sorted));
    }
    // Transfers run in ascending order of the reference unit's target cell.
    std::sort(out.begin(), out.end(), [](const MoverGroup& a, const MoverGroup& b) { return a.goals[0] < b.goals[0]; });
    return out;
}

constexpr std::size_t kOptionsPerGroup = 6;
constexpr int kMaxAttempts = 48;

// Ranked VMCS options for one group. Shapes come from the VMCS search at the
// minimal k (then k + 1 as a fallback), ranked by k, CM, landing cells outside
// P*, donors needed and canonical order. Shapes that would swallow another
// faulty unit are dropped.
std::vector<Selection> vmcs_options(const Configuration& config, const PlannerContext& ctx, const MoverGroup& group,
                                    int healthy) {
    const auto p_star = target_cells(ctx.target);
    const auto target_faults = ctx.target.config.faulty_cells();
    std::vector<FaultyUnit> units;
    for (Cell c : group.current) units.push_back({c, config.state(c)});
    const Cell reference = group.current.front();
    const Cell goal = group.goals.front();
    const Offset shift = goal - reference;

    const int min_k = vmcs_candidates(units, ctx.cm, {ctx.options.epsilon, healthy}).front().k;
    struct Ranked {
        int k;
        long long cm_rank;
        int outside;
        int vacancies;
        std::size_t canonical;
        Selection sel;
    };
    std::vector<Ranked> ranked;
    for (int k = min_k; k <= std::min(healthy, min_k + 1); ++k) {
        const auto shapes = controllable_shapes(units, k, ctx.cm, ctx.options.epsilon);
        for (std::size_t idx = 0; idx < shapes.size(); ++idx) {
            const auto& spec = shapes[idx];
            auto build = place(spec, reference);
            VmcsPlacement landing;
            for (Cell c : build.footprint) landing.footprint.push_back(c + shift);
            for (Cell c : build.faulty) landing.faulty.push_back(c + shift);
            bool ok = true;
            int vacancies = 0;
            for (Cell c : build.footprint) {
                const bool own = std::binary_search(build.faulty.begin(), build.faulty.end(), c);
                if (!own && config.state(c).is_faulty()) ok = false;
                if (!config.occupied(c)) ++vacancies;
            }
            int outside = 0;
            for (Cell c : landing.footprint) {
                const bool own = std::binary_search(landing.faulty.begin(), landing.faulty.end(), c);
                if (!own && std::binary_search(target_faults.begin(), target_faults.end(), c)) ok = false;
                if (!p_star.contains(c)) ++outside;
            }
            if (!ok) continue;
            ranked.push_back({k, -std::llround(spec.cm / 1e-12), outside, vacancies, idx,
                              Selection{VmcsTransfer{spec, build.footprint, reference, goal}, build, landing}});
        }
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        return std::tie(a.k, a.cm_rank, a.outside, a.vacancies, a.canonical) <
               std::tie(b.k, b.cm_rank, b.outside, b.vacancies, b.canonical);
    });
    std::vector<Selection> out;
    for (auto& r : ranked) {
        if (out.size() == kOptionsPerGroup) break;
        out.push_back(std::move(r.sel));
    }
    if (out.empty())
        throw PlanningError(ErrorCode::NoFeasibleVmcs, "vmcs_identify", to_string(reference),
                            "no controllable subassembly fits around the faulty unit and its target");
    return out;
}

bool overlaps(std::span<const Cell> a, std::span<const Cell> b) {
    for (Cell c : a)
        if (std::binary_search(b.begin(), b.end(), c)) return true;
    return false;
}

bool compatible(const Selection& a, const Selection& b) {
    return !overlaps(a.build.footprint, b.build.footprint) && !overlaps(a.landing.footprint, b.landing.footprint);
}

}  // namespace

TransferRoutes plan_transfer_routes(const Configuration& config, const TargetConfiguration& target,
                                    std::span<const VmcsTransfer> transfers) {
    std::set<Cell> vmcs_cells;
    for (const auto& t : transfers) vmcs_cells.insert(t.cells.begin(), t.cells.end());
    std::set<Cell> soft;
    std::set<Cell> faulty;
    for (const auto& [c, s] : config.units()) {
        if (s.is_faulty()) faulty.insert(c);
        else if (!vmcs_cells.contains(c)) soft.insert(c);
    }

    // Simulated positions: transfers before i have landed, later ones wait.
    std::vector<std::vector<Cell>> positions;
    for (const auto& t : transfers) positions.push_back(t.cells);

    std::vector<Cell> extra;
    for (const auto& t : transfers)
        for (Cell c : t.cells) extra.push_back(c + t.shift());
    const auto arena = arena_for(config, target, extra);

    TransferRoutes routes;
    std::set<Cell> swept;
    for (std::size_t i = 0; i < transfers.size(); ++i) {
        std::set<Cell> hard;
        for (Cell f : faulty)
            if (!vmcs_cells.contains(f)) hard.insert(f);
        for (std::size_t j = 0; j < transfers.size(); ++j)
            if (j != i) hard.insert(positions[j].begin(), positions[j].end());

        auto route = route_with_blockers(hard, soft, transfers[i].cells, transfers[i].faulty, transfers[i].goal, arena);
        for (Cell c : swept_cells(transfers[i].cells, transfers[i].faulty, route.path)) swept.insert(c);
        routes.paths.push_back(std::move(route.path));
        for (Cell& c : positions[i]) c = c + transfers[i].shift();
    }
    routes.swept.assign(swept.begin(), swept.end());
    for (Cell c : routes.swept)
        if (soft.contains(c)) routes.blockers.push_back(c);
    return routes;
}

std::vector<PlanStep> clear_paths(Configuration& config, const PlannerContext& ctx,
                                  std::span<const VmcsTransfer> transfers) {
    std::vector<PlanStep> steps;
    if (transfers.empty()) return steps;
    const auto routes = plan_transfer_routes(config, ctx.target, transfers);
    const std::set<Cell> swept(routes.swept.begin(), routes.swept.end());
    const auto p_star = target_cells(ctx.target);

    std::set<Cell> vmcs_cells;
    for (const auto& t : transfers) vmcs_cells.insert(t.cells.begin(), t.cells.end());

    auto next_blocker = [&]() -> std::optional<Cell> {
        for (const auto& [c, s] : config.units())
            if (!s.is_faulty() && !vmcs_cells.contains(c) && swept.contains(c)) return c;
        return std::nullopt;
    };

    while (auto blocker = next_blocker()) {
        const auto arena = arena_for(config, ctx.target, routes.swept);
        // Parking candidates in preference tiers; the first tier with a safe,
        // reachable cell wins, nearest first.
        std::vector<std::vector<Cell>> tiers(2);
        for (int y = arena.min_y; y <= arena.max_y; ++y) {
            for (int x = arena.min_x; x <= arena.max_x; ++x) {
                const Cell c{x, y};
                if (config.occupied(c) || swept.contains(c)) continue;
                if (ctx.options.relocation_rule) {
                    if (p_star.contains(c)) tiers[0].push_back(c);
                    else tiers[1].push_back(c);
                } else if (!p_star.contains(c)) {
                    if (c.y == blocker->y) tiers[0].push_back(c);
                    else tiers[1].push_back(c);
                }
            }
        }
        std::optional<std::pair<GridPath, bool>> choice;
        for (std::size_t tier = 0; tier < tiers.size() && !choice; ++tier) {
            std::optional<GridPath> best;
            for (Cell w : tiers[tier]) {
                if (!unit_move_is_safe(config, ctx, *blocker, w)) continue;
                try {
                    auto path = astar_unit(config, *blocker, w, arena);
                    if (!best || path.length() < best->length()) best = std::move(path);
                } catch (const NoPathError&) {
                }
            }
            // Waiting positions proper are vacancies of P*; anything else is
            // off-target parking.
            if (best) choice = std::make_pair(std::move(*best), !(ctx.options.relocation_rule && tier == 0));
        }
        if (!choice)
            throw PlanningError(ErrorCode::NoPath, "path_clearance", to_string(*blocker),
                                "no reachable parking cell keeps the assembly controllable");
        auto step = execute(config, ctx, StepKind::MoveUnit, Phase::PathClearance, {*blocker}, *blocker,
                            std::move(choice->first));
        step.off_target_parking = choice->second;
        steps.push_back(std::move(step));
    }
    return steps;
}

Cell virtual_start_point(const Configuration& config, const TargetConfiguration& target) {
    BoundingBox box;
    for (const auto& [c, s] : config.units()) box.extend(c);
    for (const auto& [c, s] : target.config.units()) box.extend(c);
    const auto ring = box.inflated(1);
    return {ring.min_x, ring.min_y};
}

std::vector<Cell> conflict_free_targets(const Configuration& config, const TargetConfiguration& target) {
    std::vector<Cell> remaining;
    for (const auto& [c, s] : target.config.units())
        if (!config.occupied(c)) remaining.push_back(c);
    if (remaining.size() <= 1) return remaining;

    const Cell start = virtual_start_point(config, target);
    const Configuration probe = config.attach(start, FaultState::healthy());
    const auto arena = arena_for(config, target);
    std::set<Cell> alive(remaining.begin(), remaining.end());
    for (Cell goal : remaining) {
        if (!alive.contains(goal)) continue;
        GridPath path;
        try {
            path = astar_unit(probe, start, goal, arena);
        } catch (const NoPathError&) {
            continue;
        }
        for (Cell c : path.waypoints)
            if (c != goal) alive.erase(c);
    }
    return {alive.begin(), alive.end()};
}

Assignment assign_units(const Configuration& config, std::span<const Cell> candidates, std::span<const Cell> targets,
                        const BoundingBox& arena) {
    CostMatrix cost(targets.size(), std::vector<std::int64_t>(candidates.size(), kNoEdge));
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        for (std::size_t i = 0; i < targets.size(); ++i) {
            try {
                cost[i][j] = astar_unit(config, candidates[j], targets[i], arena).length();
            } catch (const NoPathError&) {
            }
        }
    }
    const auto solution = solve_assignment(cost);
    if (!solution)
        throw Error(ErrorCode::InfeasibleAssignment, "no complete assignment of " + std::to_string(targets.size()) +
                                                         " targets to " + std::to_string(candidates.size()) +
                                                         " candidates");
    Assignment out;
    out.total_cost = solution->total;
    for (std::size_t i = 0; i < targets.size(); ++i)
        out.pairs.emplace_back(candidates[static_cast<std::size_t>(solution->column_of_row[i])], targets[i]);
    return out;
}

Assignment assign_units(const Configuration& config, const TargetConfiguration& target, std::span<const Cell> targets) {
    const auto p_star = target_cells(target);
    std::vector<Cell> candidates;
    for (const auto& [c, s] : config.units())
        if (!p_star.contains(c)) candidates.push_back(c);
    return assign_units(config, candidates, targets, arena_for(config, target));
}

Plan plan(const Configuration& config, const PhysicalParams& params, const PlannerOptions& options) {
    params.validate();
    CmEvaluator cm(params);
    return plan(config, cm, options);
}

namespace {

// Builds, clears, transfers and fills for one choice of VMCS. Throws
// PlanningError when the choice does not work out.
std::vector<PlanStep> run_pipeline(const Configuration& initial, const PlannerContext& ctx,
                                   const std::vector<Selection>& selections) {
    std::vector<PlanStep> steps;
    Configuration state = initial;
    const auto& target = ctx.target;
    const auto& options = ctx.options;

    for (std::size_t i = 0; i < selections.size(); ++i) {
        DonorOptions donor{options.c1, options.c2, options.epsilon, {}};
        for (std::size_t j = 0; j < selections.size(); ++j)
            if (j != i)
                donor.reserved.insert(donor.reserved.end(), selections[j].build.footprint.begin(),
                                      selections[j].build.footprint.end());
        for (auto& move : plan_vmcs_completion(state, target, selections[i].build, ctx.cm, donor))
            steps.push_back(execute(state, ctx, StepKind::MoveUnit, Phase::VmcsBuild, {move.donor}, move.donor,
                                    std::move(move.path)));
    }

    // A VMCS landing where another one still sits has to wait for it.
    std::vector<std::size_t> order;
    std::vector<bool> done(selections.size(), false);
    while (order.size() < selections.size()) {
        std::optional<std::size_t> pick;
        for (std::size_t i = 0; i < selections.size() && !pick; ++i) {
            if (done[i]) continue;
            bool waits = false;
            for (std::size_t j = 0; j < selections.size(); ++j)
                if (j != i && !done[j] && overlaps(selections[i].landing.footprint, selections[j].build.footprint))
                    waits = true;
            if (!waits) pick = i;
        }
        if (!pick) {  // cyclic: fall back to the default order
            for (std::size_t i = 0; i < selections.size(); ++i)
                if (!done[i]) pick = pick ? pick : i;
        }
        done[*pick] = true;
        order.push_back(*pick);
    }
    std::vector<VmcsTransfer> transfers;
    for (std::size_t i : order) transfers.push_back(selections[i].transfer);
    try {
        for (auto& step : clear_paths(state, ctx, transfers)) steps.push_back(std::move(step));
    } catch (const NoPathError& e) {
        throw PlanningError(ErrorCode::NoPath, "path_clearance", "transfer routes", e.what());
    }

    for (auto& t : transfers) {
        std::vector<Cell> landing;
        for (Cell c : t.cells) landing.push_back(c + t.shift());
        const auto arena = arena_for(state, target, landing);
        GridPath path;
        try {
            path = astar_subassembly(state, t.cells, t.faulty, t.goal, arena);
        } catch (const NoPathError& e) {
            throw PlanningError(ErrorCode::NoPath, "vmcs_transfer", to_string(t.faulty), e.what());
        }
        steps.push_back(
            execute(state, ctx, StepKind::MoveSubassembly, Phase::VmcsTransfer, t.cells, t.faulty, std::move(path)));
    }

    // Conflict-free fill of the remaining vacancies.
    const auto p_star = target_cells(target);
    while (true) {
        bool vacant = false;
        for (Cell c : p_star) vacant = vacant || !state.occupied(c);
        if (!vacant) break;

        const auto targets = conflict_free_targets(state, target);
        std::vector<Cell> candidates;
        for (const auto& [c, s] : state.units()) {
            if (p_star.contains(c)) continue;
            if (s.is_faulty())
                throw PlanningError(ErrorCode::InfeasibleAssignment, "fill_remainder", to_string(c),
                                    "faulty unit left outside the target footprint");
            if (!options.gate_in_transit || ctx.cm.system(state.detach(c)) >= options.epsilon) candidates.push_back(c);
        }
        const auto arena = arena_for(state, target);
        Assignment assignment;
        try {
            assignment = assign_units(state, candidates, targets, arena);
        } catch (const Error& e) {
            throw PlanningError(ErrorCode::InfeasibleAssignment, "fill_remainder",
                                std::to_string(targets.size()) + " targets", e.what());
        }
        if (assignment.pairs.empty())
            throw PlanningError(ErrorCode::NoPath, "fill_remainder", "vacancies", "no target vacancy is reachable");
        for (const auto& [from, to] : assignment.pairs) {
            GridPath path;
            try {
                path = astar_unit(state, from, to, arena_for(state, target));
            } catch (const NoPathError& e) {
                throw PlanningError(ErrorCode::NoPath, "fill_remainder", to_string(from), e.what());
            }
            steps.push_back(execute(state, ctx, StepKind::MoveUnit, Phase::FillRemainder, {from}, from, std::move(path)));
        }
    }

    if (!(state == target.config))
        throw PlanningError(ErrorCode::InfeasibleAssignment, "fill_remainder", "final",
                            "final configuration differs from the target");
    return steps;
}

}  // namespace

Plan plan(const Configuration& config, const CmEvaluator& cm, const PlannerOptions& options) {
    if (config.empty()) throw Error(ErrorCode::InvalidInput, "empty configuration");
    Plan result;
    result.initial = config;
    result.target = optimal_configuration(config, cm);
    if (result.target.cm < options.epsilon) {
        throw PlanningError(ErrorCode::InfeasibleTarget, "optimal_configuration", "target",
                            "best placement has CM " + std::to_string(result.target.cm));
    }
    // An input that ties the optimum is kept as it is.
    const double current = cm.system(config);
    if (result.target.config == config || current >= result.target.cm ||
        std::abs(current - result.target.cm) <= 1e-9 * std::abs(result.target.cm)) {
        result.target = TargetConfiguration{config, current};
        return result;
    }
    const PlannerContext ctx{cm, result.target, options};

    std::vector<std::pair<Cell, Cell>> movers;
    for (const auto& [from, to] : match_faults(config, result.target.config))
        if (from != to) movers.emplace_back(from, to);
    int healthy = 0;
    for (const auto& [c, s] : config.units())
        if (!s.is_faulty()) ++healthy;

    // One VMCS per faulty unit first; adjacent units sharing one VMCS is the
    // fallback. Within a grouping, depth-first over the ranked options; the
    // first complete plan wins and the first failure is reported otherwise.
    std::exception_ptr first_failure;
    std::optional<std::vector<PlanStep>> steps;
    std::optional<std::vector<MoverGroup>> previous;
    for (bool merge : {false, true}) {
        if (steps) break;
        const auto groups = group_movers(movers, merge);
        if (previous && previous->size() == groups.size()) continue;
        previous = groups;

        std::vector<std::vector<Selection>> options_per_group;
        try {
            for (const auto& g : groups) options_per_group.push_back(vmcs_options(config, ctx, g, healthy));
        } catch (const Error&) {
            if (!first_failure) first_failure = std::current_exception();
            continue;
        }
        int attempts = 0;
        std::vector<Selection> chosen;
        auto search = [&](auto&& self, std::size_t depth) -> void {
            if (steps || attempts >= kMaxAttempts) return;
            if (depth == groups.size()) {
                ++attempts;
                try {
                    steps = run_pipeline(config, ctx, chosen);
                } catch (const Error&) {
                    if (!first_failure) first_failure = std::current_exception();
                }
                return;
            }
            for (const auto& option : options_per_group[depth]) {
                bool ok = true;
                for (const auto& other : chosen) ok = ok && compatible(option, other);
                if (!ok) continue;
                chosen.push_back(option);
                self(self, depth + 1);
                chosen.pop_back();
                if (steps || attempts >= kMaxAttempts) return;
            }
        };
        search(search, 0);
        if (!steps && attempts == 0 && !first_failure)
            first_failure = std::make_exception_ptr(PlanningError(
                ErrorCode::NoFeasibleVmcs, "vmcs_identify", "groups", "the VMCS placements of the faulty units always overlap"));
    }
    if (!steps) std::rethrow_exception(first_failure);
    result.steps = std::move(*steps);
    return result;
}

std::string replay(const Plan& plan, const PhysicalParams& params, double epsilon, double cm_tolerance) {
    Configuration state = plan.initial;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& step = plan.steps[i];
        const std::string where = "step " + std::to_string(i + 1) + ": ";
        for (Cell c : step.moved_cells)
            if (!state.occupied(c)) return where + "moved cell " + to_string(c) + " is vacant";
        if (std::find(step.moved_cells.begin(), step.moved_cells.end(), step.reference) == step.moved_cells.end())
            return where + "reference cell is not moved";
        if (!path_is_clear(state, step.moved_cells, step.reference, step.path))
            return where + "path collides with a stationary unit";
        Configuration next;
        try {
            next = state.translate_set(step.moved_cells, step.path.goal() - step.reference);
        } catch (const Error& e) {
            return where + e.what();
        }
        if (!(next == step.post_config)) return where + "post configuration mismatch";
        const double cm = system_cm(next, params);
        if (!(cm == step.post_cm || std::abs(cm - step.post_cm) <= cm_tolerance * std::max(1.0, std::abs(cm))))
            return where + "post CM mismatch";
        if (cm < epsilon) return where + "post CM below the safety floor";
        state = std::move(next);
    }
    if (!(state == plan.target.config) && !plan.steps.empty()) return "final configuration differs from the target";
    return {};
}

}  // namespace mars
