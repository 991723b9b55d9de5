#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "mars/error.hpp"
#include "mars/io.hpp"

namespace mars::io {

namespace {

constexpr const char* kFormat = "mars-plan";
constexpr int kVersion = 1;

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidInput, msg); }

json cm_to_json(double cm) {
    if (std::isinf(cm) && cm > 0) return nullptr;
    return round_cm(cm);
}

double cm_from_json(const json& doc, const std::string& where) {
    if (doc.is_null()) return kFaultFree;
    if (!doc.is_number()) bad(where + ": expected a number or null");
    return doc.get<double>();
}

const json& field(const json& doc, const char* key, const std::string& where) {
    if (!doc.is_object()) bad(where + ": expected an object");
    if (!doc.contains(key)) bad(where + ": missing '" + key + "'");
    return doc[key];
}

std::vector<Cell> cells_from_json(const json& doc, const std::string& where) {
    if (!doc.is_array()) bad(where + ": expected an array");
    std::vector<Cell> out;
    for (std::size_t i = 0; i < doc.size(); ++i) out.push_back(cell_from_json(doc[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

json cells_to_json(std::span<const Cell> cells) {
    json out = json::array();
    for (Cell c : cells) out.push_back(cell_to_json(c));
    return out;
}

std::string format_cm(double cm) {
    if (std::isinf(cm)) return cm > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", cm);
    return buf;
}

}  // namespace

double round_cm(double cm) {
    if (!std::isfinite(cm)) return cm;
    const double r = std::round(cm * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;  // no negative zero
}

json plan_to_json(const Plan& plan) {
    json steps = json::array();
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& s = plan.steps[i];
        steps.push_back({{"index", i + 1},
                         {"kind", std::string(to_string(s.kind))},
                         {"phase", std::string(to_string(s.phase))},
                         {"moved_cells", cells_to_json(s.moved_cells)},
                         {"reference", cell_to_json(s.reference)},
                         {"path", cells_to_json(s.path.waypoints)},
                         {"path_length", s.path.length()},
                         {"post_cm", cm_to_json(s.post_cm)},
                         {"transit_cm", cm_to_json(s.transit_cm)},
                         {"off_target_parking", s.off_target_parking},
                         {"post_config", configuration_to_json(s.post_config)}});
    }
    const auto sum = plan.summary();
    json summary = {{"step_count", sum.step_count},
                    {"detach_attach_count", sum.detach_attach_count},
                    {"total_path_length", sum.total_path_length},
                    {"min_cm", cm_to_json(sum.min_cm)},
                    {"target_config", configuration_to_json(sum.target_config)}};
    return {{"format", kFormat},
            {"version", kVersion},
            {"initial", configuration_to_json(plan.initial)},
            {"target", {{"config", configuration_to_json(plan.target.config)}, {"cm", cm_to_json(plan.target.cm)}}},
            {"steps", steps},
            {"summary", summary}};
}

Plan plan_from_json(const json& doc) {
    const auto& format = field(doc, "format", "plan");
    if (!format.is_string() || format.get<std::string>() != kFormat) bad("plan.format: not a plan file");
    const auto& version = field(doc, "version", "plan");
    if (!version.is_number_integer() || version.get<int>() != kVersion) bad("plan.version: unsupported");

    Plan plan;
    plan.initial = configuration_from_json(field(doc, "initial", "plan"), "plan.initial");
    const auto& target = field(doc, "target", "plan");
    plan.target.config = configuration_from_json(field(target, "config", "plan.target"), "plan.target.config");
    plan.target.cm = cm_from_json(field(target, "cm", "plan.target"), "plan.target.cm");

    const auto& steps = field(doc, "steps", "plan");
    if (!steps.is_array()) bad("plan.steps: expected an array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string at = "plan.steps[" + std::to_string(i) + "]";
        const auto& s = steps[i];
        PlanStep step;
        const auto& kind = field(s, "kind", at);
        const auto parsed_kind = kind.is_string() ? parse_step_kind(kind.get<std::string>()) : std::nullopt;
        if (!parsed_kind) bad(at + ".kind: unknown step kind");
        step.kind = *parsed_kind;
        const auto& phase = field(s, "phase", at);
        const auto parsed_phase = phase.is_string() ? parse_phase(phase.get<std::string>()) : std::nullopt;
        if (!parsed_phase) bad(at + ".phase: unknown phase");
        step.phase = *parsed_phase;
        step.moved_cells = cells_from_json(field(s, "moved_cells", at), at + ".moved_cells");
        step.reference = cell_from_json(field(s, "reference", at), at + ".reference");
        step.path.waypoints = cells_from_json(field(s, "path", at), at + ".path");
        if (step.path.waypoints.empty()) bad(at + ".path: empty");
        const auto& length = field(s, "path_length", at);
        if (!length.is_number_integer() || length.get<int>() != step.path.length())
            bad(at + ".path_length: does not match the path");
        step.post_cm = cm_from_json(field(s, "post_cm", at), at + ".post_cm");
        step.transit_cm = cm_from_json(field(s, "transit_cm", at), at + ".transit_cm");
        const auto& parking = field(s, "off_target_parking", at);
        if (!parking.is_boolean()) bad(at + ".off_target_parking: expected a boolean");
        step.off_target_parking = parking.get<bool>();
        step.post_config = configuration_from_json(field(s, "post_config", at), at + ".post_config");
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

std::string serialize_plan(const Plan& plan) { return plan_to_json(plan).dump(2) + "\n"; }

void save_plan(const Plan& plan, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
    out << serialize_plan(plan);
}

Plan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open " + path.string());
    try {
        return plan_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        bad(path.string() + ": " + e.what());
    }
}

void write_cm_trace(const Plan& plan, const PhysicalParams& params, std::ostream& out) {
    out << "step_index,phase,moved_count,path_length,post_cm\n";
    out << "0,initial,0,0," << format_cm(system_cm(plan.initial, params)) << '\n';
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& s = plan.steps[i];
        out << i + 1 << ',' << to_string(s.phase) << ',' << s.moved_cells.size() << ',' << s.path.length() << ','
            << format_cm(s.post_cm) << '\n';
    }
}

}  // namespace mars::io
