#pragma once

#include "actionforge/trajectory.hpp"

#include <functional>
#include <map>
#include <string>

namespace actionforge {

/// F(t,x) with its x-gradient. Evaluation must be pure and reentrant; the
/// checkers and solvers call `value`/`gradient` from tight loops and may do so
/// concurrently from independent solves.
struct PotentialModel {
  std::string name;
  double period = 1.0;  ///< T, the declared time period
  int dim = 1;          ///< N
  Lattice lattice;      ///< declared spatial periods (condition F2), may be all-none
  std::function<double(double, const Vec&)> value;
  std::function<Vec(double, const Vec&)> gradient;
};

/// Pendulum gravity term only: F(t,x) = -a cos(x), lattice period 2*pi.
PotentialModel make_unforced_pendulum(double a, double period);

/// Absorbs a forcing term into the potential: F'(t,x) = F(t,x) - e(t).x, so
/// the Euler-Lagrange equation picks up +e(t). e.period must equal p.period.
PotentialModel with_forcing(const PotentialModel& p, const FourierTrajectory& e);

/// The forced pendulum u'' = -a sin(u) + e(t): F(t,x) = -a cos(x) - e(t) x.
/// Requires a > 0 and a zero-mean e (throws std::invalid_argument otherwise);
/// route through with_forcing directly to experiment with nonzero-mean
/// forcing, which breaks the lattice integral condition.
PotentialModel make_pendulum(double a, const FourierTrajectory& forcing_e);

/// F(t,x) = delta * (1 - exp(-|x|^2)): bounded, positive away from 0.
PotentialModel make_soft_well(double delta, double period, int dim);

/// F(t,x) = 0.5*omega0^2 x^2 - eps*cos(omega t) x  (N = 1).
PotentialModel make_linear_oscillator(double omega0, double omega, double eps, double period);

/// Builds a PotentialModel from an expression for F(t, x1..xN); the gradient
/// is produced by exact symbolic differentiation.
PotentialModel make_expr_potential(const std::string& formula, int dim, double period,
                                   Lattice lattice);

// --------------------------------------------------------------------------
// Hypothesis checkers
// --------------------------------------------------------------------------

/// Sampling grid for the hypothesis checkers. Every report states the domain
/// it sampled; a pass certifies nothing beyond that domain.
struct CheckGrid {
  int t_nodes = 64;            ///< time nodes over [0, T)
  int x_nodes = 41;            ///< nodes per spatial axis
  double x_min = -10.0;
  double x_max = 10.0;
  int quad_nodes = 256;        ///< time-quadrature nodes for integral comparisons
  int annulus_directions = 64; ///< direction samples for the F5 annulus
  int annulus_radii = 17;
  double tolerance = 1e-9;          ///< relative pass tolerance
  double lattice_tolerance = 1e-8;  ///< relative tolerance for integral comparison
  std::uint64_t seed = 20240915;    ///< direction sampling for dim > 3
};

struct Witness {
  double t = 0.0;
  Vec x;
};

/// Outcome of one sampled hypothesis audit. `worst_violation` is the
/// tolerance-adjusted margin: <= 0 iff the condition passed on the sampled
/// domain. Raw extrema live in `details`.
struct HypothesisReport {
  std::string condition;
  bool checked = true;
  bool passed = false;
  double worst_violation = 0.0;
  Witness witness;
  long samples_used = 0;
  double tolerance = 0.0;
  std::string domain_note;
  std::string failure_code;  ///< "", "pointwise", "threshold", "nonfinite"
  std::map<std::string, double> details;
};

/// Condition (A) proxy: F and its gradient stay finite on compact slabs
/// |x| <= r; records max|F| and max|grad F| per slab.
HypothesisReport check_A(const PotentialModel& p, const CheckGrid& grid);

/// (F1): F(t+T, x) = F(t, x) on the sampled grid.
HypothesisReport check_F1(const PotentialModel& p, const CheckGrid& grid);

/// (F2) via Eq-style integral comparison: for every lattice direction,
/// int_0^T F(t, x+T_i e_i) dt equals int_0^T F(t, x) dt on the x-grid.
HypothesisReport check_lattice_integral(const PotentialModel& p, const Lattice& lattice,
                                        const CheckGrid& grid);

/// (F3): |F(t,x)| <= C1|x|^2 + C2 pointwise, plus the theorem threshold
/// C1 < (1/2)(2*pi/T)^2. A threshold breach is reported with
/// failure_code = "threshold" rather than a pointwise witness.
HypothesisReport check_F3(const PotentialModel& p, double C1, double C2, const CheckGrid& grid);

/// (F4): grad F(t,x).x <= mu1 F(t,x) + mu2 on the grid. mu1 >= 2 is rejected
/// with std::invalid_argument (the theorem requires mu1 < 2).
HypothesisReport check_F4(const PotentialModel& p, double mu1, double mu2, const CheckGrid& grid);

struct F5F6Report {
  HypothesisReport f5;  ///< F > delta sampled on the annulus R <= |x| <= 2R
  HypothesisReport f6;  ///< F <= b|x|^2 on the grid
  bool t_below_threshold = false;
  double t_threshold = 0.0;  ///< sqrt(2/b)*pi
};

F5F6Report check_F5_F6(const PotentialModel& p, double delta, double R, double b,
                       const CheckGrid& grid);

/// Max relative deviation between `gradient` and central differences of
/// `value` at `trials` random points; the PotentialModel consistency
/// invariant asks for <= 1e-6.
double gradient_consistency_max_error(const PotentialModel& p, int trials, std::uint64_t seed,
                                      double box_halfwidth = 5.0);

}  // namespace actionforge
