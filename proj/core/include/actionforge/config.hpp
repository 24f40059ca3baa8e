#pragma once

#include "actionforge/potential.hpp"
#include "actionforge/solvers.hpp"
#include "actionforge/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace actionforge {

/// Configuration problem: names the offending JSON path.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, std::string json_path = "")
      : std::runtime_error(json_path.empty() ? msg : msg + " (at " + json_path + ")"),
        path(std::move(json_path)) {}
  std::string path;
};

struct PendulumSpec {
  double a = 1.0;
  std::vector<double> forcing_cos;
  std::vector<double> forcing_sin;
  double forcing_mean = 0.0;
};

struct ExprSpec {
  std::string formula;
  std::optional<Lattice> lattice;
};

struct SoftWellSpec {
  double delta = 0.1;
};

struct PotentialSpec {
  std::string type;  ///< "pendulum" | "expr" | "soft_well"
  PendulumSpec pendulum;
  ExprSpec expr;
  SoftWellSpec soft_well;
};

/// Optional constants consumed by the hypothesis checkers; absent constants
/// leave the corresponding rows "not checked".
struct CheckConstants {
  std::optional<double> C1, C2;     // (F3)
  std::optional<double> mu1, mu2;   // (F4)
  std::optional<double> delta, R;   // (F5)
  std::optional<double> b;          // (F6) and the T-threshold
};

struct ProblemConfig {
  PotentialSpec potential;
  double T = 1.0;
  int N = 1;
  int M = 16;
  int K = 0;  ///< 0 = default_quadrature_nodes(M)
  SolveConfig solver;
  std::optional<Lattice> lattice;  ///< overrides the potential's built-in lattice
  double saddle_R = 1.0;
  double residual_bound = 1e-6;  ///< exit-0 gate for the solve commands
  CheckConstants check;
  CheckGrid grid;
};

/// Strict parse: unknown keys anywhere fail fast with their JSON path;
/// T > 0, N >= 1, M >= 1 and (when given) K >= 2M+1 are enforced here.
ProblemConfig parse_problem_config(const nlohmann::json& j);

/// Reads and parses; wraps file and JSON syntax problems in ConfigError.
ProblemConfig load_problem_config(const std::string& path);

/// Instantiates the configured potential with the config's T, N and lattice.
PotentialModel build_potential(const ProblemConfig& cfg);

/// The lattice a solve should use: the explicit config lattice when present,
/// otherwise the potential's built-in one.
Lattice effective_lattice(const ProblemConfig& cfg, const PotentialModel& p);

}  // namespace actionforge
