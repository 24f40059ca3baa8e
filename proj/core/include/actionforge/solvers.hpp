#pragma once

#include "actionforge/action.hpp"
#include "actionforge/potential.hpp"
#include "actionforge/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace actionforge {

struct SolveConfig {
  int max_iter = 2000;
  double grad_tol = 1e-10;  ///< stop when the coefficient gradient norm drops below this

  // line search (direct minimization)
  int memory = 10;          ///< quasi-Newton history length
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_line_search = 60;

  // descent-ascent (saddle search); ascent defaults to half the descent step
  double descent_step = 0.2;
  double ascent_step = 0.1;
  double divergence_norm = 1e6;

  std::uint64_t seed = 0;

  // discretization used by callers that build the start iterate
  int harmonics_M = 16;
  int quadrature_K = 0;  ///< 0 means default_quadrature_nodes(M)

  void validate() const;
  int nodes_for(int harmonics) const;
};

enum class SolveStatus { Converged, MaxIterations, LineSearchFailure, Diverged, NonFinite };

std::string to_string(SolveStatus s);

struct TraceEntry {
  int iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double cps = 0.0;       ///< (1 + ||u||_H1) * grad_norm, the (CPS) monitor
  double tilde_h1 = 0.0;  ///< equivalent norm of the zero-mean part, ||u'||_L2
  Vec mean;
};

struct SolveResult {
  FourierTrajectory trajectory;
  double f_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  SolveStatus status = SolveStatus::MaxIterations;
  std::string message;
  std::vector<double> cps_series;
  std::vector<TraceEntry> trace;
  bool lattice_warning = false;  ///< set when the declared lattice fails its integral check
  bool nonconstant = false;      ///< harmonic coefficient energy above 1e-8
  double harmonic_energy = 0.0;  ///< sum_k |a_k|^2 + |b_k|^2
  SolveConfig config;            ///< echo for reproducibility
};

/// H1-consistent random start: mean uniform in the fundamental cell (or
/// [-1,1]^N without a lattice), harmonic k Gaussian with scale 0.1/k^2.
FourierTrajectory random_trajectory(double period, int dim, int harmonics, const Lattice& lattice,
                                    std::mt19937_64& rng);

/// Diagonal preconditioner 1 / (1 + (T/2) w_k^2) per harmonic block (1 on the
/// mean block); removes the stiffness of the kinetic term.
Vec gradient_preconditioner(const FourierTrajectory& u);

/// Direct minimization (limited-memory quasi-Newton with Armijo backtracking).
/// After every accepted step the mean is translated back into the fundamental
/// cell, which leaves the action invariant for potentials with the declared
/// lattice periodicity. The lattice integral condition is spot-checked first;
/// a failure sets lattice_warning instead of aborting.
SolveResult minimize_direct(const FourierTrajectory& u0, const PotentialModel& p,
                            const Lattice& lattice, const SolveConfig& cfg);

/// Two-timescale gradient descent-ascent: ascent on the mean block (the
/// finite-dimensional X1), preconditioned descent on the harmonic blocks
/// (X2). Terminates on the full gradient norm; diverging iterates are
/// reported as a geometry diagnostic rather than an exception.
SolveResult saddle_search(const PotentialModel& p, const SolveConfig& cfg, double sphere_R);

/// Same, from a caller-supplied start.
SolveResult saddle_search_from(const FourierTrajectory& u0, const PotentialModel& p,
                               const SolveConfig& cfg, double sphere_R);

struct SaddleGeometryReport {
  double sup_sphere = 0.0;     ///< sampled sup of f over constants with |c| = R
  double inf_x2_samples = 0.0; ///< sampled inf of f over zero-mean trajectories (includes u = 0)
  bool geometry_ok = false;    ///< sup_sphere < inf_x2_samples
  bool threshold_checked = false;
  bool t_below_threshold = false;
  double t_threshold = 0.0;    ///< sqrt(2/b)*pi when b is supplied
  double sphere_R = 0.0;
  long samples_used = 0;
};

/// Samples the saddle-point-theorem linking geometry sup_{S_R} f < inf_{X2} f.
/// b, when given, also evaluates the T < sqrt(2/b)*pi threshold.
SaddleGeometryReport check_saddle_geometry(const PotentialModel& p, double R,
                                           const SolveConfig& cfg,
                                           std::optional<double> b = std::nullopt);

struct CoercivityConstants {
  double C1 = 0.0;
  double C2 = 0.0;
};

struct DiagnosticCheck {
  bool checked = false;
  bool passed = true;
  double detail = 0.0;
};

struct SequenceDiagnostic {
  DiagnosticCheck tilde_norm_bounded;  ///< (i) zero-mean norms under the coercivity bound
  DiagnosticCheck means_in_cell;       ///< (ii) iterate means stay in the fundamental cell
  DiagnosticCheck cps_trend;           ///< (iii) smoothed (CPS) series decreasing
  bool all_passed() const;
};

/// Audits a solve trace against the minimizing-sequence structure: bounded
/// zero-mean parts (from the quadratic-growth constants, when supplied),
/// cell-confined means, and a decreasing smoothed (CPS) monitor
/// (window 10, 20% per-step slack).
SequenceDiagnostic minimizing_sequence_diagnostic(const SolveResult& result, const Lattice& lattice,
                                                  std::optional<CoercivityConstants> constants);

}  // namespace actionforge
