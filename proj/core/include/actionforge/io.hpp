#pragma once

#include "actionforge/action.hpp"
#include "actionforge/potential.hpp"
#include "actionforge/solvers.hpp"
#include "actionforge/trajectory.hpp"
#include "actionforge/verify.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>

namespace actionforge {

// Trajectory wire format: {"T": , "N": , "M": , "mean": [N], "cos": [M][N], "sin": [M][N]}
nlohmann::json to_json(const FourierTrajectory& u);
FourierTrajectory trajectory_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Lattice& lattice);
Lattice lattice_from_json(const nlohmann::json& j, int dim);

// Gradient layout in ActionReport JSON: [ mean(N) | a_1(N) | b_1(N) | ... | a_M(N) | b_M(N) ]
nlohmann::json to_json(const ActionReport& r);

nlohmann::json to_json(const HypothesisReport& r);
nlohmann::json to_json(const SolveConfig& c);
nlohmann::json to_json(const SolveResult& r, bool include_trace = true);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const SaddleGeometryReport& r);
nlohmann::json to_json(const SequenceDiagnostic& d);
nlohmann::json to_json(const PropertySuiteReport& r);

/// Samples plus derivatives: header "t,u_1..u_N,du_1..du_N", rows at
/// t_j = j*T/K for j = 0..K (the last row closes the period).
void write_trajectory_csv(std::ostream& out, const FourierTrajectory& u, int samples);

/// Per-iteration trace: header "iter,f,grad_norm,cps".
void write_trace_csv(std::ostream& out, const SolveResult& r);

}  // namespace actionforge
