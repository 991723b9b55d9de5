#include <fstream>
#include <set>
#include <sstream>

#include "mars/error.hpp"
#include "mars/io.hpp"

namespace mars::io {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidInput, msg); }

void require_object(const json& doc, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!doc.is_object()) bad(where + ": expected an object");
    for (const auto& [key, value] : doc.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) bad(where + ": unknown key '" + key + "'");
    }
}

double number(const json& doc, const std::string& where) {
    if (!doc.is_number()) bad(where + ": expected a number");
    return doc.get<double>();
}

}  // namespace

Cell cell_from_json(const json& doc, const std::string& where) {
    if (!doc.is_array() || doc.size() != 2 || !doc[0].is_number_integer() || !doc[1].is_number_integer())
        bad(where + ": expected [x, y] integer pair");
    return {doc[0].get<int>(), doc[1].get<int>()};
}

json cell_to_json(Cell c) { return json::array({c.x, c.y}); }

FaultState fault_from_json(const json& doc, const std::string& where, Cell* cell) {
    require_object(doc, where, {"cell", "kind", "rotor_index"});
    if (!doc.contains("cell")) bad(where + ": missing 'cell'");
    if (!doc.contains("kind") || !doc["kind"].is_string()) bad(where + ": missing 'kind'");
    *cell = cell_from_json(doc["cell"], where + ".cell");
    const auto kind = doc["kind"].get<std::string>();
    if (kind == "unit") {
        if (doc.contains("rotor_index")) bad(where + ": 'rotor_index' only applies to rotor faults");
        return FaultState::unit_fault();
    }
    if (kind == "rotor") {
        if (!doc.contains("rotor_index") || !doc["rotor_index"].is_number_integer())
            bad(where + ": rotor fault needs an integer 'rotor_index'");
        const int idx = doc["rotor_index"].get<int>();
        if (idx < 0 || idx >= kRotorsPerUnit) bad(where + ": rotor_index out of range");
        return FaultState::rotor_fault(idx);
    }
    bad(where + ": kind must be 'rotor' or 'unit'");
}

json fault_to_json(Cell c, const FaultState& s) {
    json f = {{"cell", cell_to_json(c)}};
    if (s.kind() == FaultState::Kind::UnitFault) {
        f["kind"] = "unit";
    } else {
        f["kind"] = "rotor";
        f["rotor_index"] = s.rotor_index();
    }
    return f;
}

json configuration_to_json(const Configuration& config) {
    json cells = json::array();
    json faults = json::array();
    for (const auto& [c, s] : config.units()) {
        cells.push_back(cell_to_json(c));
        if (s.is_faulty()) faults.push_back(fault_to_json(c, s));
    }
    return {{"cells", cells}, {"faults", faults}};
}

namespace {

Configuration::Units read_units(const json& doc, const std::string& where) {
    if (!doc.contains("cells") || !doc["cells"].is_array()) bad(where + ": missing 'cells' array");
    Configuration::Units units;
    std::size_t i = 0;
    for (const auto& c : doc["cells"]) {
        const Cell cell = cell_from_json(c, where + ".cells[" + std::to_string(i++) + "]");
        if (!units.emplace(cell, FaultState::healthy()).second) bad(where + ": duplicate cell " + to_string(cell));
    }
    if (doc.contains("faults")) {
        if (!doc["faults"].is_array()) bad(where + ".faults: expected an array");
        std::set<Cell> seen;
        i = 0;
        for (const auto& f : doc["faults"]) {
            const std::string at = where + ".faults[" + std::to_string(i++) + "]";
            Cell cell;
            const FaultState state = fault_from_json(f, at, &cell);
            if (!units.contains(cell)) bad(at + ": fault cell " + to_string(cell) + " is not occupied");
            if (!seen.insert(cell).second) bad(at + ": second fault on " + to_string(cell));
            units[cell] = state;
        }
    }
    return units;
}

}  // namespace

Configuration configuration_from_json(const json& doc, const std::string& where) {
    require_object(doc, where, {"cells", "faults"});
    return Configuration(read_units(doc, where));
}

Scenario parse_scenario(const json& doc) {
    require_object(doc, "scenario", {"name", "notes", "cells", "faults", "params", "weights", "flags"});
    Scenario s;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) bad("scenario.name: expected a string");
        s.name = doc["name"].get<std::string>();
    }
    s.config = Configuration(read_units(doc, "scenario"));
    if (s.config.empty()) bad("scenario.cells: no units");

    if (doc.contains("params")) {
        const auto& p = doc["params"];
        require_object(p, "scenario.params",
                       {"unit_mass", "module_pitch", "arm_offset", "rotor_thrust_max", "yaw_drag_coeff", "gravity",
                        "spin"});
        auto set = [&](const char* key, double& field) {
            if (p.contains(key)) field = number(p[key], std::string("scenario.params.") + key);
        };
        set("unit_mass", s.params.unit_mass);
        set("module_pitch", s.params.module_pitch);
        set("arm_offset", s.params.arm_offset);
        set("rotor_thrust_max", s.params.rotor_thrust_max);
        set("yaw_drag_coeff", s.params.yaw_drag_coeff);
        set("gravity", s.params.gravity);
        if (p.contains("spin")) {
            const auto& sp = p["spin"];
            if (!sp.is_array() || sp.size() != kRotorsPerUnit) bad("scenario.params.spin: expected 4 entries");
            for (std::size_t i = 0; i < kRotorsPerUnit; ++i) {
                if (!sp[i].is_number_integer()) bad("scenario.params.spin: expected integers");
                s.params.spin[i] = sp[i].get<int>();
            }
        }
    }
    try {
        s.params.validate();
    } catch (const Error& e) {
        bad(std::string("scenario.params: ") + e.what());
    }

    if (doc.contains("weights")) {
        const auto& w = doc["weights"];
        require_object(w, "scenario.weights", {"c1", "c2", "epsilon"});
        if (w.contains("c1")) s.options.c1 = number(w["c1"], "scenario.weights.c1");
        if (w.contains("c2")) s.options.c2 = number(w["c2"], "scenario.weights.c2");
        if (w.contains("epsilon")) s.options.epsilon = number(w["epsilon"], "scenario.weights.epsilon");
        if (s.options.c1 < 0) bad("scenario.weights.c1: must be non-negative");
        if (s.options.c2 > 0) bad("scenario.weights.c2: must be non-positive");
    }
    if (doc.contains("flags")) {
        const auto& f = doc["flags"];
        require_object(f, "scenario.flags", {"relocation_rule"});
        if (f.contains("relocation_rule")) {
            if (!f["relocation_rule"].is_boolean()) bad("scenario.flags.relocation_rule: expected a boolean");
            s.options.relocation_rule = f["relocation_rule"].get<bool>();
        }
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        bad(path.string() + ": " + e.what());
    }
    return parse_scenario(doc);
}

json scenario_to_json(const Scenario& s) {
    json doc = configuration_to_json(s.config);
    if (!s.name.empty()) doc["name"] = s.name;
    const auto& p = s.params;
    doc["params"] = {{"unit_mass", p.unit_mass},
                     {"module_pitch", p.module_pitch},
                     {"arm_offset", p.arm_offset},
                     {"rotor_thrust_max", p.rotor_thrust_max},
                     {"yaw_drag_coeff", p.yaw_drag_coeff},
                     {"gravity", p.gravity},
                     {"spin", p.spin}};
    doc["weights"] = {{"c1", s.options.c1}, {"c2", s.options.c2}, {"epsilon", s.options.epsilon}};
    doc["flags"] = {{"relocation_rule", s.options.relocation_rule}};
    return doc;
}

std::string describe_params(const PhysicalParams& p) {
    std::ostringstream out;
    out << "unit_mass=" << p.unit_mass << " module_pitch=" << p.module_pitch << " arm_offset=" << p.arm_offset
        << " rotor_thrust_max=" << p.rotor_thrust_max << " yaw_drag_coeff=" << p.yaw_drag_coeff
        << " gravity=" << p.gravity << " spin=[" << p.spin[0] << ',' << p.spin[1] << ',' << p.spin[2] << ','
        << p.spin[3] << ']';
    return out.str();
}

}  // namespace mars::io
