#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "mfg/solver.hpp"

namespace mfg {

class ConfigError : public std::invalid_argument {
  public:
    ConfigError(int line, const std::string& message)
        : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line(line) {}
    int line;
};

// Flat dotted-key run configuration. Required keys: dim, n, problem.name.
// Everything else defaults per module; unknown keys are rejected.
struct RunConfig {
    int dim = 0;
    int n = 0;
    std::string problem_name;
    std::string coupling_name = "identity";
    EpsSchedule schedule;
    NewtonOptions newton;
    double bisect_tol = 1e-10;
    unsigned seed = 12345;
    std::string output_dir = ".";

    SolveConfig solve_config() const { return {schedule, newton, bisect_tol}; }
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace mfg
