// marsplan: fault-tolerant reconfiguration planner for modular aerial robots.
//
// Exit codes: 0 success, 1 input error, 2 infeasible target, 3 planning error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mars/error.hpp"
#include "mars/io.hpp"
#include "mars/planner.hpp"

namespace {

enum Exit { kOk = 0, kInputError = 1, kInfeasibleTarget = 2, kPlanningError = 3 };

// MARS_PARAMS points at a JSON object with the same keys as a scenario's
// "params" block; it replaces the built-in defaults before scenario overrides.
mars::io::Scenario load(const std::string& input) {
    auto doc = [&] {
        std::ifstream in(input);
        if (!in) throw mars::Error(mars::ErrorCode::InvalidInput, "cannot open " + input);
        try {
            return mars::io::json::parse(in);
        } catch (const mars::io::json::parse_error& e) {
            throw mars::Error(mars::ErrorCode::InvalidInput, input + ": " + e.what());
        }
    }();
    if (const char* env = std::getenv("MARS_PARAMS"); env && *env) {
        std::ifstream in(env);
        if (!in) throw mars::Error(mars::ErrorCode::InvalidInput, std::string("MARS_PARAMS: cannot open ") + env);
        mars::io::json defaults;
        try {
            defaults = mars::io::json::parse(in);
        } catch (const mars::io::json::parse_error& e) {
            throw mars::Error(mars::ErrorCode::InvalidInput, std::string("MARS_PARAMS: ") + e.what());
        }
        if (!defaults.is_object()) throw mars::Error(mars::ErrorCode::InvalidInput, "MARS_PARAMS: expected an object");
        if (doc.is_object()) {
            auto merged = defaults;
            if (doc.contains("params")) merged.update(doc["params"]);
            doc["params"] = merged;
        }
    }
    return mars::io::parse_scenario(doc);
}

std::string format_cm(double cm) {
    if (std::isinf(cm) && cm > 0) return "fault-free";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", cm);
    return buf;
}

int run_cm(const std::string& input) {
    const auto scenario = load(input);
    std::cout << "# params: " << mars::io::describe_params(scenario.params) << '\n';
    const auto subs = mars::faulty_subassembly_cms(scenario.config, scenario.params);
    if (subs.empty()) {
        std::cout << "fault-free\n";
        return kOk;
    }
    std::cout << "system " << format_cm(mars::system_cm(scenario.config, scenario.params)) << '\n';
    for (const auto& [sub, cm] : subs)
        std::cout << "subassembly " << mars::to_string(sub.cells().front()) << " units=" << sub.cells().size()
                  << " faults=" << sub.faulty_cells().size() << ' ' << format_cm(cm) << '\n';
    return kOk;
}

struct PlanArgs {
    std::string input, output, trace, svg_dir;
    std::optional<double> c1, c2, epsilon;
    bool no_rule = false;
    std::optional<unsigned> seed;
};

int run_plan(const PlanArgs& args) {
    auto scenario = load(args.input);
    if (args.c1) scenario.options.c1 = *args.c1;
    if (args.c2) scenario.options.c2 = *args.c2;
    if (args.epsilon) scenario.options.epsilon = *args.epsilon;
    if (args.no_rule) scenario.options.relocation_rule = false;
    // The planner is deterministic; --seed is accepted for scripting symmetry.

    const auto plan = mars::plan(scenario.config, scenario.params, scenario.options);
    mars::io::save_plan(plan, args.output);
    if (!args.trace.empty()) {
        std::ofstream out(args.trace, std::ios::binary);
        if (!out) throw mars::Error(mars::ErrorCode::InvalidInput, "cannot write " + args.trace);
        mars::io::write_cm_trace(plan, scenario.params, out);
    }
    if (!args.svg_dir.empty()) mars::io::write_step_svgs(plan, args.svg_dir);

    const auto s = plan.summary();
    std::cout << "steps " << s.step_count << " detach_attach " << s.detach_attach_count << " path_length "
              << s.total_path_length << " min_cm " << format_cm(s.min_cm) << " target_cm "
              << format_cm(plan.target.cm) << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fault-tolerant self-reconfiguration planner for modular aerial robots"};
    app.require_subcommand(1);

    PlanArgs plan_args;
    auto* plan_cmd = app.add_subcommand("plan", "Plan a reconfiguration to the most controllable layout");
    plan_cmd->add_option("--input", plan_args.input, "Scenario JSON")->required();
    plan_cmd->add_option("--output", plan_args.output, "Plan JSON to write")->required();
    plan_cmd->add_option("--cm-trace", plan_args.trace, "CSV trace of CM per step");
    plan_cmd->add_option("--svg-dir", plan_args.svg_dir, "Directory for per-step SVG frames");
    plan_cmd->add_option("--c1", plan_args.c1, "Donor weight on squared CM deviation");
    plan_cmd->add_option("--c2", plan_args.c2, "Donor weight on path length (non-positive)");
    plan_cmd->add_option("--epsilon", plan_args.epsilon, "CM safety floor");
    plan_cmd->add_flag("--no-relocation-rule", plan_args.no_rule, "Park blockers without preferring target vacancies");
    plan_cmd->add_option("--seed", plan_args.seed, "Accepted for compatibility; planning is deterministic");

    std::string cm_input;
    auto* cm_cmd = app.add_subcommand("cm", "Print the control margin of a scenario");
    cm_cmd->add_option("--input", cm_input, "Scenario JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kInputError;
    }

    try {
        if (*cm_cmd) return run_cm(cm_input);
        return run_plan(plan_args);
    } catch (const mars::Error& e) {
        std::cerr << "error [" << mars::to_string(e.code()) << "]: " << e.what() << '\n';
        switch (e.code()) {
            case mars::ErrorCode::InvalidInput:
                return kInputError;
            case mars::ErrorCode::InfeasibleTarget:
                return kInfeasibleTarget;
            default:
                return kPlanningError;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kPlanningError;
    }
}
