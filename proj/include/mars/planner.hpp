#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mars/configuration.hpp"
#include "mars/grid_search.hpp"
#include "mars/vmcs.hpp"
#include "mars/zonotope.hpp"

namespace mars {

enum class StepKind { MoveUnit, MoveSubassembly };
enum class Phase { VmcsBuild, PathClearance, VmcsTransfer, FillRemainder };

std::string_view to_string(StepKind kind);
std::string_view to_string(Phase phase);
std::optional<StepKind> parse_step_kind(std::string_view text);
std::optional<Phase> parse_phase(std::string_view text);

// One relocation: detach `moved_cells`, translate along `path` (waypoints of
// `reference`), attach.
struct PlanStep {
    StepKind kind = StepKind::MoveUnit;
    Phase phase = Phase::FillRemainder;
    std::vector<Cell> moved_cells;  // pre-move, sorted
    Cell reference;
    GridPath path;
    Configuration post_config;
    double post_cm = kFaultFree;
    double transit_cm = kFaultFree;  // while the moved set is in flight
    bool off_target_parking = false;

    friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct PlanSummary {
    int step_count = 0;
    int detach_attach_count = 0;  // one detach plus one attach per step
    int total_path_length = 0;
    double min_cm = kFaultFree;   // over every post-step configuration
    Configuration target_config;

    friend bool operator==(const PlanSummary&, const PlanSummary&) = default;
};

struct Plan {
    Configuration initial;
    TargetConfiguration target;
    std::vector<PlanStep> steps;

    PlanSummary summary() const;
};

struct PlannerOptions {
    double c1 = 4.0;
    double c2 = -0.1;
    double epsilon = 0.0;
    bool relocation_rule = true;
    // Also require the stationary remainder and the moving group to stay
    // controllable while a subassembly is in flight.
    bool gate_in_transit = false;
};

// A VMCS scheduled for transfer: its current cells and where the faulty
// reference cell has to go.
struct VmcsTransfer {
    VmcsSpec spec;
    std::vector<Cell> cells;  // current absolute footprint, sorted
    Cell faulty;              // current cell of the reference faulty unit
    Cell goal;                // p_f in F*

    Offset shift() const { return goal - faulty; }
};

// Shared state threaded through the phases.
struct PlannerContext {
    const CmEvaluator& cm;
    const TargetConfiguration& target;
    PlannerOptions options;
};

// Relocates every blocker (a normal unit on a transfer trajectory or target
// footprint) to its nearest waiting position. `config` is advanced in place.
std::vector<PlanStep> clear_paths(Configuration& config, const PlannerContext& ctx,
                                  std::span<const VmcsTransfer> transfers);

// Union of the swept cells of every transfer, each planned against the state
// left by the previous ones. Normal units outside the VMCS are passable.
struct TransferRoutes {
    std::vector<GridPath> paths;
    std::vector<Cell> swept;     // T, sorted
    std::vector<Cell> blockers;  // sorted
};
TransferRoutes plan_transfer_routes(const Configuration& config, const TargetConfiguration& target,
                                    std::span<const VmcsTransfer> transfers);

// Virtual start point: minimal (y, x) cell on the ring just outside the
// bounding box of P and P*.
Cell virtual_start_point(const Configuration& config, const TargetConfiguration& target);

// Remaining target vacancies that lie on no other vacancy's access path.
std::vector<Cell> conflict_free_targets(const Configuration& config, const TargetConfiguration& target);

struct Assignment {
    std::vector<std::pair<Cell, Cell>> pairs;  // (candidate p_c, target p_t), in target order
    std::int64_t total_cost = 0;
};

// Minimum total A* length matching; candidates default to P \ P*.
Assignment assign_units(const Configuration& config, const TargetConfiguration& target, std::span<const Cell> targets);
Assignment assign_units(const Configuration& config, std::span<const Cell> candidates, std::span<const Cell> targets,
                        const BoundingBox& arena);

Plan plan(const Configuration& config, const PhysicalParams& params, const PlannerOptions& options = {});
Plan plan(const Configuration& config, const CmEvaluator& cm, const PlannerOptions& options = {});

// Re-executes every step through the core model and checks paths, post
// configurations, CM values and the safety floor. Returns an empty string on
// success, otherwise a description of the first violation. Plans read back
// from JSON carry CMs rounded to 1e-6, so pass a matching tolerance.
std::string replay(const Plan& plan, const PhysicalParams& params, double epsilon = 0.0, double cm_tolerance = 1e-9);

}  // namespace mars
