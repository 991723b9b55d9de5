#include "mars/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <Eigen/SVD>

#include "mars/error.hpp"

namespace mars {

namespace {

// Normal of the hyperplane spanned by three vectors in R^4 (generalised cross
// product via cofactor expansion).
Wrench cross3(const Wrench& a, const Wrench& b, const Wrench& c) {
    auto det3 = [&](int i, int j, int k) {
        return a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i]) +
               a[k] * (b[i] * c[j] - b[j] * c[i]);
    };
    return Wrench(det3(1, 2, 3), -det3(0, 2, 3), det3(0, 1, 3), -det3(0, 1, 2));
}

struct NormalKey {
    std::array<long long, 4> q;
    friend bool operator==(const NormalKey&, const NormalKey&) = default;
};

struct NormalKeyHash {
    std::size_t operator()(const NormalKey& k) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (long long v : k.q) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
        return h;
    }
};

NormalKey quantize(const Wrench& unit_normal, double tol) {
    // Sign-canonical: first non-negligible component positive.
    Wrench n = unit_normal;
    for (int i = 0; i < 4; ++i) {
        if (std::abs(n[i]) > tol) {
            if (n[i] < 0) n = -n;
            break;
        }
    }
    NormalKey key;
    for (int i = 0; i < 4; ++i) key.q[i] = std::llround(n[i] / tol);
    return key;
}

int wrench_rank(const std::vector<Wrench>& generators) {
    Eigen::Matrix<double, 4, Eigen::Dynamic> m(4, static_cast<Eigen::Index>(generators.size()));
    for (std::size_t i = 0; i < generators.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = generators[i];
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, Eigen::Dynamic>> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-10 * sv[0]) ++rank;
    return rank;
}

}  // namespace

void PhysicalParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvalidInput, std::string(name) + " must be positive");
    };
    positive(unit_mass, "unit_mass");
    positive(module_pitch, "module_pitch");
    positive(arm_offset, "arm_offset");
    positive(rotor_thrust_max, "rotor_thrust_max");
    positive(yaw_drag_coeff, "yaw_drag_coeff");
    positive(gravity, "gravity");
    if (!(arm_offset < module_pitch / 2))
        throw Error(ErrorCode::InvalidInput, "arm_offset must be less than module_pitch / 2");
    int plus = 0, minus = 0;
    for (int s : spin) {
        if (s == 1) ++plus;
        else if (s == -1) ++minus;
        else throw Error(ErrorCode::InvalidInput, "spin entries must be +1 or -1");
    }
    if (plus != 2 || minus != 2) throw Error(ErrorCode::InvalidInput, "spin layout needs two +1 and two -1 rotors");
}

std::array<Eigen::Vector2d, kRotorsPerUnit> PhysicalParams::rotor_offsets() const {
    const double a = arm_offset;
    return {Eigen::Vector2d(a, a), Eigen::Vector2d(-a, a), Eigen::Vector2d(-a, -a), Eigen::Vector2d(a, -a)};
}

double WrenchZonotope::max_thrust() const {
    double t = center[0];
    for (const auto& g : generators) t += std::abs(g[0]);
    return t;
}

double WrenchZonotope::support(const Wrench& direction) const {
    double h = direction.dot(center);
    for (const auto& g : generators) h += std::abs(direction.dot(g));
    return h;
}

GravityWrench gravity_wrench(std::size_t unit_count, const PhysicalParams& params) {
    GravityWrench g;
    g.value[0] = static_cast<double>(unit_count) * params.unit_mass * params.gravity;
    return g;
}

Eigen::Vector2d footprint_centroid(std::span<const Cell> cells, const PhysicalParams& params) {
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (Cell c : cells) sum += params.world(c);
    return cells.empty() ? sum : Eigen::Vector2d(sum / static_cast<double>(cells.size()));
}

WrenchZonotope build_zonotope(std::span<const UnitRotors> units, const Eigen::Vector2d& reference,
                              const PhysicalParams& params) {
    WrenchZonotope z;
    const double half = params.rotor_thrust_max / 2.0;
    const auto offsets = params.rotor_offsets();
    for (const auto& unit : units) {
        const Eigen::Vector2d centre = params.world(unit.cell);
        for (int k = 0; k < kRotorsPerUnit; ++k) {
            if (unit.dead.test(static_cast<std::size_t>(k))) continue;
            const Eigen::Vector2d arm = centre + offsets[static_cast<std::size_t>(k)] - reference;
            const Wrench column(1.0, arm.y(), -arm.x(), params.yaw_drag_coeff * params.spin[static_cast<std::size_t>(k)]);
            z.generators.push_back(half * column);
            z.center += half * column;
        }
    }
    return z;
}

WrenchZonotope build_zonotope(const Subassembly& sub, const PhysicalParams& params) {
    std::vector<UnitRotors> units;
    std::vector<Cell> cells;
    for (const auto& [cell, state] : sub.units.units()) {
        units.push_back({cell, state.dead_rotors()});
        cells.push_back(cell);
    }
    return build_zonotope(units, footprint_centroid(cells, params), params);
}

double distance_to_zonotope(const WrenchZonotope& omega, const Wrench& point, double tolerance,
                            std::size_t max_sweeps) {
    const auto& gens = omega.generators;
    if (gens.empty()) return (point - omega.center).norm();

    // Coordinate descent on min ||center + G s - point|| over the box
    // s in [-1, 1]^m, stopped by the duality-gap certificate
    //   ||r|| - (eta . point - h(eta)) <= tolerance,  eta = r / ||r||.
    std::vector<double> s(gens.size(), 0.0);
    std::vector<double> norms2(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) norms2[i] = gens[i].squaredNorm();
    Wrench r = point - omega.center;
    double best_upper = r.norm();
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        for (std::size_t i = 0; i < gens.size(); ++i) {
            if (norms2[i] == 0.0) continue;
            const double next = std::clamp(s[i] + gens[i].dot(r) / norms2[i], -1.0, 1.0);
            const double delta = next - s[i];
            if (delta != 0.0) {
                s[i] = next;
                r -= delta * gens[i];
            }
        }
        const double upper = r.norm();
        best_upper = std::min(best_upper, upper);
        if (upper <= tolerance) return upper;
        const Wrench eta = r / upper;
        const double lower = eta.dot(point) - omega.support(eta);
        if (upper - lower <= tolerance) return upper;
    }
    return best_upper;
}

double cm_signed_distance(const WrenchZonotope& omega, const GravityWrench& g, const PhysicalParams& params,
                          const CmOptions& options) {
    const auto& gens = omega.generators;
    const double tol = options.projection_tol_scale * params.rotor_thrust_max;
    if (gens.empty()) return -(g.value - omega.center).norm();

    if (wrench_rank(gens) == 4) {
        const Wrench offset = omega.center - g.value;
        std::vector<double> gnorm(gens.size());
        for (std::size_t i = 0; i < gens.size(); ++i) gnorm[i] = gens[i].norm();

        std::unordered_set<NormalKey, NormalKeyHash> seen;
        double margin = std::numeric_limits<double>::infinity();
        const std::size_t m = gens.size();
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                for (std::size_t k = j + 1; k < m; ++k) {
                    Wrench n = cross3(gens[i], gens[j], gens[k]);
                    const double len = n.norm();
                    if (len <= 1e-12 * gnorm[i] * gnorm[j] * gnorm[k]) continue;  // rank < 3
                    n /= len;
                    if (!seen.insert(quantize(n, options.normal_dedup_tol)).second) continue;
                    double spread = 0.0;
                    for (const auto& gl : gens) spread += std::abs(n.dot(gl));
                    margin = std::min(margin, spread - std::abs(n.dot(offset)));
                }
            }
        }
        if (margin > tol) return margin;
    }
    // Boundary or exterior (or a flat zonotope with empty interior).
    const double d = distance_to_zonotope(omega, g.value, tol, options.max_projection_sweeps);
    return d <= tol ? 0.0 : -d;
}

double subassembly_cm(const Subassembly& sub, const PhysicalParams& params) {
    return cm_signed_distance(build_zonotope(sub, params), gravity_wrench(sub.units.size(), params), params);
}

std::vector<std::pair<Subassembly, double>> faulty_subassembly_cms(const Configuration& config,
                                                                    const PhysicalParams& params) {
    std::vector<std::pair<Subassembly, double>> out;
    for (auto& sub : partition(config)) {
        if (!sub.has_fault()) continue;
        const double cm = subassembly_cm(sub, params);
        out.emplace_back(std::move(sub), cm);
    }
    return out;
}

double system_cm(const Configuration& config, const PhysicalParams& params) {
    double cm = kFaultFree;
    for (const auto& [sub, value] : faulty_subassembly_cms(config, params)) cm = std::min(cm, value);
    return cm;
}

double CmEvaluator::subassembly(const Subassembly& sub) const {
    std::vector<std::pair<Cell, FaultState>> key;
    const auto cells = sub.cells();
    const auto box = bounding_box(cells);
    key.reserve(cells.size());
    for (const auto& [cell, state] : sub.units.units()) key.emplace_back(cell - Offset{box.min_x, box.min_y}, state);
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const double cm = subassembly_cm(sub, params_);
    std::lock_guard lock(mutex_);
    cache_.emplace(std::move(key), cm);
    return cm;
}

double CmEvaluator::system(const Configuration& config) const {
    double cm = kFaultFree;
    for (const auto& sub : partition(config))
        if (sub.has_fault()) cm = std::min(cm, subassembly(sub));
    return cm;
}

double CmEvaluator::in_transit(const Configuration& config, std::span<const Cell> moving) const {
    Configuration::Units stationary = config.units();
    Configuration::Units lifted;
    for (Cell c : moving) {
        auto it = stationary.find(c);
        if (it == stationary.end()) throw Error(ErrorCode::CellNotOccupied, "in-transit " + to_string(c));
        lifted.emplace(*it);
        stationary.erase(it);
    }
    return std::min(system(Configuration(std::move(stationary))), system(Configuration(std::move(lifted))));
}

}  // namespace mars
