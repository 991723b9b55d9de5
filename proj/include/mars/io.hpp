#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "mars/planner.hpp"

namespace mars::io {

using json = nlohmann::json;

struct Scenario {
    std::string name;
    Configuration config;
    PhysicalParams params;
    PlannerOptions options;
};

// Throws mars::Error(InvalidInput) naming the offending key.
Scenario parse_scenario(const json& doc);
Scenario load_scenario(const std::filesystem::path& path);
json scenario_to_json(const Scenario& scenario);

json cell_to_json(Cell c);
Cell cell_from_json(const json& doc, const std::string& where);
json fault_to_json(Cell c, const FaultState& s);
FaultState fault_from_json(const json& doc, const std::string& where, Cell* cell);

json configuration_to_json(const Configuration& config);
Configuration configuration_from_json(const json& doc, const std::string& where);

// CM values are rounded to six decimals; the fault-free sentinel is null.
json plan_to_json(const Plan& plan);
Plan plan_from_json(const json& doc);
std::string serialize_plan(const Plan& plan);
void save_plan(const Plan& plan, const std::filesystem::path& path);
Plan load_plan(const std::filesystem::path& path);

double round_cm(double cm);

// Rows: step_index, phase, moved_count, path_length, post_cm. Row 0 is the
// initial configuration.
void write_cm_trace(const Plan& plan, const PhysicalParams& params, std::ostream& out);

std::string describe_params(const PhysicalParams& params);

// One SVG per configuration: index 0 is the initial state, index i the state
// after step i.
std::string render_step_svg(const Plan& plan, std::size_t index);
void write_step_svgs(const Plan& plan, const std::filesystem::path& dir);

}  // namespace mars::io
