#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracheat/error.hpp"
#include "fracheat/solver.hpp"

namespace fracheat {

// A problem read from a config file, with the textual pieces kept for reports.
struct ProblemSpec {
    CauchyProblem problem;
    nlohmann::json snapshot;  // config after presets are applied
    std::string f_text;
    std::vector<std::string> trace_texts;
    Expr exact;               // empty when the config carries no closed form
    std::string exact_text;
    unsigned seed = 7;
};

nlohmann::json preset_config(const std::string &name);
// Applies a top-level "preset" key, then the explicit keys on top of it.
nlohmann::json resolve_config(const nlohmann::json &raw);
ProblemSpec build_problem(const nlohmann::json &raw);
std::string config_hash(const nlohmann::json &cfg);

// maps library errors to the exit codes 2 (config), 3 (precondition) and 4 (numerical)
int exit_code_for(const Error &e);

int run_cli(int argc, char **argv);

} // namespace fracheat
