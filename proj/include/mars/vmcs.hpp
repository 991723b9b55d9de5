#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mars/configuration.hpp"
#include "mars/grid_search.hpp"
#include "mars/zonotope.hpp"

namespace mars {

// (P*, F*): the input footprint with the faulty units re-placed to maximise CM.
struct TargetConfiguration {
    Configuration config;
    double cm = kFaultFree;
};

struct OptimalConfigurationOptions {
    // Relative tolerance under which two placements count as tied.
    double tie_tolerance = 1e-9;
    // Among tied maximisers prefer faulty units close to the footprint
    // centroid (smallest sum of squared distances), then the placement needing
    // the least total Manhattan displacement if enabled, then the
    // lexicographically smallest faulty-cell set.
    bool prefer_central_faults = true;
    bool prefer_least_displacement = false;
};

TargetConfiguration optimal_configuration(const Configuration& config, const CmEvaluator& cm,
                                          const OptimalConfigurationOptions& options = {});
TargetConfiguration optimal_configuration(const Configuration& config, const PhysicalParams& params);

// Kind-respecting matching of the faulty units of `from` onto those of `to`
// with minimum total Manhattan displacement; pairs (from, to) sorted by `from`.
std::vector<std::pair<Cell, Cell>> match_faults(const Configuration& from, const Configuration& to);
int fault_displacement(const Configuration& from, const Configuration& to);

// n^2 times the sum of squared distances between the faulty cells and the
// footprint centroid (n = unit count). Integer valued, so exact.
long long fault_spread(const Configuration& config);

// Every distinct arrangement of `faults` (a multiset) onto the chosen cells,
// for every choice of |faults| cells out of `footprint`. Deterministic order.
std::vector<Configuration> fault_placements(std::span<const Cell> footprint, std::span<const FaultState> faults);

// All 4-connected cell sets of size |anchor| + k containing the anchor cells,
// in canonical order (lexicographic on the sorted cell list). Coordinates are
// those of the anchor.
std::vector<std::vector<Cell>> enumerate_connected_shapes(std::span<const Cell> anchor, int k);

struct FaultyUnit {
    Cell cell;
    FaultState state;
};

// Virtual minimum controllable subassembly. Local coordinates place the first
// faulty cell at the origin.
struct VmcsSpec {
    std::vector<Cell> footprint;
    std::vector<Cell> faulty_local;
    std::vector<FaultState> faulty_states;
    int k = 0;
    double cm = -kFaultFree;
};

struct VmcsOptions {
    double epsilon = 0.0;  // safety floor: accept once CM* >= epsilon
    int max_helpers = -1;  // available normal units; -1 means unbounded
};

// Algorithm: grow k from zero until the best shape reaches the floor. Returns
// the best shape; ties are resolved by canonical shape order.
VmcsSpec identify_vmcs(std::span<const FaultyUnit> group, const CmEvaluator& cm, const VmcsOptions& options = {});
VmcsSpec identify_vmcs(std::span<const FaultyUnit> group, const PhysicalParams& params,
                       const VmcsOptions& options = {});

// Every shape at the minimal k, best CM first (ties in canonical order). The
// first element equals identify_vmcs().
std::vector<VmcsSpec> vmcs_candidates(std::span<const FaultyUnit> group, const CmEvaluator& cm,
                                      const VmcsOptions& options = {});

// All shapes with exactly k helpers that satisfy the floor, best first.
std::vector<VmcsSpec> controllable_shapes(std::span<const FaultyUnit> group, int k, const CmEvaluator& cm,
                                          double epsilon);

// A VMCS instantiated in the grid.
struct VmcsPlacement {
    std::vector<Cell> footprint;  // absolute, sorted
    std::vector<Cell> faulty;     // absolute, sorted
};

VmcsPlacement place(const VmcsSpec& spec, Cell faulty_anchor);

struct DonorOptions {
    double c1 = 4.0;
    double c2 = -0.1;
    double epsilon = 0.0;
    // Cells that may not donate (other VMCS footprints).
    std::vector<Cell> reserved;
};

struct DonorChoice {
    Cell donor;
    Cell vacancy;
    GridPath path;
    double objective = 0.0;
    double detached_cm = 0.0;
};

// Flies a donor into every vacant cell of the placement (in (y, x) order),
// each donor minimising c1 * dCM^2 - c2 * L. Candidates whose detachment or
// arrival drops the system CM below epsilon are rejected.
std::vector<DonorChoice> plan_vmcs_completion(const Configuration& config, const TargetConfiguration& target,
                                              const VmcsPlacement& placement, const CmEvaluator& cm,
                                              const DonorOptions& options);

}  // namespace mars
