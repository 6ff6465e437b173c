#pragma once

#include "hspace/geodesic.hpp"
#include "hspace/segre.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace hspace {

/// Everything a command needs besides its own flags. Parsed from JSON:
///
///   {"space": {"family": "3(21)", "signs": {"e3": -1, "e4": 1, "e5": 1, "e6": -1},
///              "lambda": 5, "c": 0, "epsilon": 1, "reading": "amended",
///              "functions": {"theta": "sin(x3)", "omega": "x5*x6"}},
///    "sampling": {"seed": 42, "box": [[lo, hi], ... six pairs]},
///    "integration": {"dt": 1e-3, "steps": 1000, "method": "rk4", "rk45_tol": 1e-10},
///    "tolerances": {"tol_residual": 1e-9, "tol_cluster": 1e-6, "tol_rank": 1e-8,
///                   "tol_drift": 1e-8}}
///
/// Only space.family is required. Unknown keys are errors.
struct RunConfig {
  HSpaceConfig space;
  std::optional<Box> box;  // default_box() of the space when absent
  std::uint64_t seed = 42;
  IntegrateOptions integration;
  double tol_residual = 1e-9;
  SegreTolerances segre;
  double tol_drift = 1e-8;
};

/// Throws ConfigError with the offending key path.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Checks what parse_run_config checks; for configs assembled in code.
void validate(const RunConfig& config);

/// The configured box, or the family default.
Box sampling_box(const RunConfig& config, const HSpace& space);

}  // namespace hspace
