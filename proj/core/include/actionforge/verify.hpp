#pragma once

#include "actionforge/potential.hpp"
#include "actionforge/solvers.hpp"
#include "actionforge/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace actionforge {

/// Independent evidence that a trajectory solves u'' = -grad F(t, u).
struct VerificationReport {
  double residual_sup = 0.0;        ///< max_j |u''(t_j) + grad F(t_j, u(t_j))|
  double residual_l2 = 0.0;
  double periodicity_defect = 0.0;  ///< |u(T)-u(0)| + |u'(T)-u'(0)| (0 by construction)
  double nonconstancy = 0.0;        ///< L2 norm of the zero-mean part
  int dense_K = 0;
  std::optional<double> refinement_delta;  ///< |f_M - f_2M| when a refinement ran
  std::optional<double> oracle_gap;        ///< sup gap to the shooting oracle when run
};

/// max(1024, 8M)
int default_residual_nodes(int harmonics);

/// Dense ODE residual on dense_K >= 8M periodic nodes.
VerificationReport ode_residual(const FourierTrajectory& u, const PotentialModel& p, int dense_K);

// ---------------------------------------------------------------------------
// Shooting oracle: RK4 time stepping + Newton on the initial conditions.
// Entirely independent of the spectral discretization and the action module.
// ---------------------------------------------------------------------------

struct ShootingResult {
  bool converged = false;
  int newton_iterations = 0;
  Vec initial_position, initial_velocity;
  double periodicity_defect = 0.0;   ///< |z(T) - z(0)| at the returned orbit
  double step_halving_check = 0.0;   ///< |z(T)| difference between h and h/2 integrations
  std::vector<double> times;         ///< dense samples over [0, T]
  std::vector<Vec> positions;
  std::vector<Vec> velocities;
  std::string message;
};

/// Finds a periodic orbit of u'' = -grad F(t,u) by Newton iteration on
/// (u(0), u'(0)) with the map z -> z(T) integrated by fixed-step RK4.
/// The Jacobian uses forward differences (step 1e-7). Newton tolerance 1e-10,
/// at most 50 steps; on failure the last iterate is returned with
/// converged = false.
ShootingResult shooting_oracle(const PotentialModel& p, const Vec& position_guess,
                               const Vec& velocity_guess, int steps = 10000);

/// max over the oracle's sample times of |u(t) - u_oracle(t)|.
double oracle_sup_gap(const FourierTrajectory& u, const ShootingResult& oracle);

/// Re-solves at twice the harmonic count starting from the zero-padded
/// solution and reports |f_M - f_2M|. `use_saddle` selects the solve path.
double refinement_delta(const SolveResult& solved, const PotentialModel& p, const Lattice& lattice,
                        bool use_saddle = false);

// ---------------------------------------------------------------------------
// Property suite
// ---------------------------------------------------------------------------

struct PropertyFailure {
  int trial = 0;
  std::string check;
  std::string trajectory_json;  ///< full trajectory dump for replay
};

struct PropertySuiteReport {
  int trials = 0;
  std::uint64_t seed = 0;
  bool all_passed = false;
  long failures = 0;

  double pw_min_slack_rel = 0.0;        ///< Poincare-Wirtinger slack, >= -1e-12 expected
  double sobolev_worst_margin_rel = 0.0;///< sup vs sqrt(T/12)||u'||: positive margin = satisfied
  double equality_worst_defect = 0.0;   ///< first-harmonic equality case
  double roundtrip_worst = 0.0;         ///< DFT analysis/synthesis round trip
  double grad_fd_worst = 0.0;           ///< action gradient vs central differences
  double translation_worst = 0.0;       ///< |f(u+T1 e1) - f(u)| / (1+|f|), lattice potential only
  bool translation_checked = false;

  std::vector<PropertyFailure> failure_records;
};

/// Runs `trials` randomized checks of the trajectory-space inequalities and
/// the exactness properties. Per-trial seeds are seed + index, so any failure
/// is replayable in isolation.
PropertySuiteReport property_suite(int trials, std::uint64_t seed,
                                   const std::optional<PotentialModel>& lattice_potential);

}  // namespace actionforge
