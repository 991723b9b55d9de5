#pragma once

#include <array>
#include <limits>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mars/cell.hpp"
#include "mars/configuration.hpp"

namespace mars {

using Wrench = Eigen::Vector4d;  // (T, tau_x, tau_y, tau_z)

// Physical model of one unit: an X-quadrotor whose rotors sit at
// (+-arm_offset, +-arm_offset) from the unit centre. Rotor slots are numbered
// counter-clockwise starting at (+a, +a).
struct PhysicalParams {
    double unit_mass = 0.032;        // kg
    double module_pitch = 0.15;      // m
    double arm_offset = 0.0325;      // m
    double rotor_thrust_max = 0.15;  // N
    double yaw_drag_coeff = 0.006;   // m
    double gravity = 9.81;           // m/s^2
    std::array<int, kRotorsPerUnit> spin{+1, -1, +1, -1};

    // Throws InvalidInput when an invariant is violated.
    void validate() const;

    std::array<Eigen::Vector2d, kRotorsPerUnit> rotor_offsets() const;
    Eigen::Vector2d world(Cell c) const { return {c.x * module_pitch, c.y * module_pitch}; }

    friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;
};

// Feasible control input set Omega = { center + sum s_i g_i : s_i in [-1, 1] }.
struct WrenchZonotope {
    Wrench center = Wrench::Zero();
    std::vector<Wrench> generators;

    double max_thrust() const;
    // h(eta) = eta . center + sum |eta . g_i|
    double support(const Wrench& direction) const;
};

struct GravityWrench {
    Wrench value = Wrench::Zero();
};

GravityWrench gravity_wrench(std::size_t unit_count, const PhysicalParams& params);

// One unit of an assembly as seen by the allocation model.
struct UnitRotors {
    Cell cell;
    RotorMask dead;
};

// Torques are taken about `reference` (world metres).
WrenchZonotope build_zonotope(std::span<const UnitRotors> units, const Eigen::Vector2d& reference,
                              const PhysicalParams& params);
// Torques about the footprint centroid.
WrenchZonotope build_zonotope(const Subassembly& sub, const PhysicalParams& params);

Eigen::Vector2d footprint_centroid(std::span<const Cell> cells, const PhysicalParams& params);

struct CmOptions {
    double normal_dedup_tol = 1e-9;
    double projection_tol_scale = 1e-9;  // relative to f_max
    std::size_t max_projection_sweeps = 200000;
};

// Signed distance from g to the boundary of omega: positive inside, zero on the
// boundary, minus the distance to omega outside.
double cm_signed_distance(const WrenchZonotope& omega, const GravityWrench& g, const PhysicalParams& params,
                          const CmOptions& options = {});

// Euclidean distance from point to omega (zero when contained).
double distance_to_zonotope(const WrenchZonotope& omega, const Wrench& point, double tolerance,
                            std::size_t max_sweeps = 200000);

inline constexpr double kFaultFree = std::numeric_limits<double>::infinity();

double subassembly_cm(const Subassembly& sub, const PhysicalParams& params);
// Minimum CM over the subassemblies that contain a fault, or kFaultFree.
double system_cm(const Configuration& config, const PhysicalParams& params);

// Per-subassembly CM values for the faulty components, in partition order.
std::vector<std::pair<Subassembly, double>> faulty_subassembly_cms(const Configuration& config,
                                                                    const PhysicalParams& params);

// Memoising evaluator. CM is translation invariant, so results are keyed by the
// normalised footprint together with the fault states. Thread-safe.
class CmEvaluator {
public:
    explicit CmEvaluator(PhysicalParams params) : params_(std::move(params)) {}

    const PhysicalParams& params() const { return params_; }
    double subassembly(const Subassembly& sub) const;
    double system(const Configuration& config) const;
    // CM while `moving` is in flight: both the stationary remainder and the
    // moving group as a separate rigid body.
    double in_transit(const Configuration& config, std::span<const Cell> moving) const;

private:
    PhysicalParams params_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<std::pair<Cell, FaultState>>, double> cache_;
};

}  // namespace mars
