#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "actionforge/io.hpp"
#include "actionforge/solvers.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace actionforge;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

FourierTrajectory cos_forcing(double period, double amp) {
  FourierTrajectory e(period, 1, 1);
  e.set_cos_coeff(1, Vec::Constant(1, amp));
  return e;
}

SolveConfig quiet_config(std::uint64_t seed, int M) {
  SolveConfig cfg;
  cfg.seed = seed;
  cfg.harmonics_M = M;
  return cfg;
}

}  // namespace

TEST_CASE("minimize_direct: unforced pendulum minimizer is the inverted equilibrium") {
  const PotentialModel p = make_unforced_pendulum(1.0, 1.0);
  const SolveConfig cfg = quiet_config(7, 8);
  std::mt19937_64 rng(cfg.seed);
  const FourierTrajectory u0 = random_trajectory(1.0, 1, 8, p.lattice, rng);
  const SolveResult r = minimize_direct(u0, p, p.lattice, cfg);

  REQUIRE(r.converged);
  CHECK(r.grad_norm <= cfg.grad_tol);
  CHECK(r.f_value == Approx(-1.0).epsilon(1e-9));          // f = -aT
  CHECK(r.trajectory.mean()[0] == Approx(kPi).epsilon(1e-7));
  CHECK(r.harmonic_energy < 1e-16);                         // harmonics die out
  CHECK_FALSE(r.lattice_warning);
}

TEST_CASE("minimize_direct: descent property is exact along the trace") {
  const PotentialModel p = make_pendulum(1.0, cos_forcing(1.0, 0.3));
  const SolveConfig cfg = quiet_config(3, 8);
  std::mt19937_64 rng(cfg.seed);
  const FourierTrajectory u0 = random_trajectory(1.0, 1, 8, p.lattice, rng);
  const SolveResult r = minimize_direct(u0, p, p.lattice, cfg);

  REQUIRE(r.converged);
  REQUIRE(r.trace.size() >= 2);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].f <= r.trace[i - 1].f);  // exact non-increase (Armijo)
  }
  // means stay in the fundamental cell after every accepted step
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].mean[0] >= 0.0);
    CHECK(r.trace[i].mean[0] < kTwoPi);
  }
  // converged iterate solves the discrete critical-point equations
  CHECK(r.grad_norm <= 1e-10);
}

TEST_CASE("minimize_direct: a start at the minimizer returns immediately") {
  const PotentialModel p = make_unforced_pendulum(1.0, 1.0);
  FourierTrajectory u0(1.0, 1, 4);
  u0.set_mean(Vec::Constant(1, kPi));
  const SolveResult r = minimize_direct(u0, p, p.lattice, quiet_config(0, 4));
  CHECK(r.converged);
  CHECK(r.iterations <= 1);
  CHECK(r.trajectory.mean()[0] == Approx(kPi).epsilon(1e-12));
}

TEST_CASE("minimize_direct: argmin invariance under lattice translation of the start") {
  const PotentialModel p = make_pendulum(1.0, cos_forcing(1.0, 0.3));
  const SolveConfig cfg = quiet_config(11, 8);
  std::mt19937_64 rng(cfg.seed);
  FourierTrajectory u0 = random_trajectory(1.0, 1, 8, p.lattice, rng);
  FourierTrajectory shifted = u0;
  shifted.set_mean(u0.mean() + Vec::Constant(1, kTwoPi));

  const SolveResult a = minimize_direct(u0, p, p.lattice, cfg);
  const SolveResult b = minimize_direct(shifted, p, p.lattice, cfg);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  const FourierTrajectory ra = a.trajectory.reduced_mean_to_cell(p.lattice);
  const FourierTrajectory rb = b.trajectory.reduced_mean_to_cell(p.lattice);
  CHECK((ra.coefficients() - rb.coefficients()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("minimize_direct: identical config and seed reproduce bit-identical results") {
  const PotentialModel p = make_pendulum(1.0, cos_forcing(1.0, 0.3));
  const SolveConfig cfg = quiet_config(5, 6);
  std::mt19937_64 rng1(cfg.seed), rng2(cfg.seed);
  const FourierTrajectory u1 = random_trajectory(1.0, 1, 6, p.lattice, rng1);
  const FourierTrajectory u2 = random_trajectory(1.0, 1, 6, p.lattice, rng2);
  const SolveResult a = minimize_direct(u1, p, p.lattice, cfg);
  const SolveResult b = minimize_direct(u2, p, p.lattice, cfg);
  CHECK(a.f_value == b.f_value);
  CHECK((a.trajectory.coefficients() - b.trajectory.coefficients()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(to_json(a, true).dump() == to_json(b, true).dump());
}

TEST_CASE("minimize_direct: max_iter cut-off reports a usable partial result") {
  const PotentialModel p = make_pendulum(1.0, cos_forcing(1.0, 0.3));
  SolveConfig cfg = quiet_config(13, 8);
  cfg.max_iter = 1;
  std::mt19937_64 rng(cfg.seed);
  const FourierTrajectory u0 = random_trajectory(1.0, 1, 8, p.lattice, rng);
  const SolveResult r = minimize_direct(u0, p, p.lattice, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.status == SolveStatus::MaxIterations);
  CHECK(r.iterations == 1);
  CHECK(r.trace.size() == 2);
  CHECK(std::isfinite(r.f_value));
}

TEST_CASE("minimize_direct: lattice warning fires for a non-lattice potential") {
  // pendulum form with mean-1 forcing: integral condition fails for T1 = 2*pi
  FourierTrajectory e_one(1.0, 1, 0);
  e_one.set_mean(Vec::Constant(1, 1.0));
  const PotentialModel p = with_forcing(make_unforced_pendulum(1.0, 1.0), e_one);
  SolveConfig cfg = quiet_config(1, 4);
  cfg.max_iter = 5;  // the warn flag is what this test is about
  std::mt19937_64 rng(cfg.seed);
  const FourierTrajectory u0 = random_trajectory(1.0, 1, 4, Lattice{{kTwoPi}}, rng);
  const SolveResult r = minimize_direct(u0, p, Lattice{{kTwoPi}}, cfg);
  CHECK(r.lattice_warning);
}

TEST_CASE("saddle_search: linear forced oscillator reproduces the closed form") {
  // omega0=1, omega=2, eps=0.3, T=pi: u*(t) = -0.1 cos(2t)
  const PotentialModel p = make_linear_oscillator(1.0, 2.0, 0.3, kPi);
  SolveConfig cfg = quiet_config(21, 4);
  cfg.grad_tol = 1e-12;
  cfg.max_iter = 5000;
  const SolveResult r = saddle_search(p, cfg, 1.0);

  REQUIRE(r.converged);
  CHECK(r.nonconstant);
  CHECK(r.trajectory.cos_coeff(1)[0] == Approx(-0.1).epsilon(1e-9));
  CHECK(std::abs(r.trajectory.mean()[0]) < 1e-10);
  CHECK(std::abs(r.trajectory.sin_coeff(1)[0]) < 1e-10);
  // whole curve matches the particular solution in sup norm
  for (int j = 0; j < 64; ++j) {
    const double t = kPi * j / 64;
    CHECK(r.trajectory.evaluate(t)[0] == Approx(-0.1 * std::cos(2.0 * t)).epsilon(1e-8).scale(1.0));
  }
  // the saddle value of the linear oscillator is -(T/4) eps^2/(w^2-w0^2) < 0
  CHECK(r.f_value == Approx(-(kPi / 4.0) * 0.09 / 3.0).epsilon(1e-8));
}

TEST_CASE("saddle_search: closed-form amplitude for random admissible oscillators") {
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double T = kTwoPi;
    const double base = kTwoPi / T;  // = 1
    const int k = 1 + static_cast<int>(u01(rng) * 3.99);
    const double omega = k * base;
    const double omega0 = (0.3 + 0.4 * u01(rng)) * base;  // below the first harmonic
    const double eps = 0.1 + 0.4 * u01(rng);
    REQUIRE(std::abs(omega0 * omega0 - omega * omega) >= 0.5);

    const PotentialModel p = make_linear_oscillator(omega0, omega, eps, T);
    SolveConfig cfg = quiet_config(100 + static_cast<std::uint64_t>(trial), std::max(4, k + 1));
    cfg.grad_tol = 1e-12;
    cfg.max_iter = 20000;
    const SolveResult r = saddle_search(p, cfg, 1.0);
    REQUIRE(r.converged);
    const double expected = eps / (omega0 * omega0 - omega * omega);
    CHECK(r.trajectory.cos_coeff(k)[0] == Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("saddle_search: soft well collapses to the constant critical point") {
  const PotentialModel p = make_soft_well(0.1, 1.0, 1);
  SolveConfig cfg = quiet_config(31, 6);
  cfg.max_iter = 5000;
  const SolveResult r = saddle_search(p, cfg, 5.0);
  REQUIRE(r.converged);
  CHECK_FALSE(r.nonconstant);
  CHECK(std::abs(r.f_value) < 1e-9);
  CHECK(std::abs(r.trajectory.mean()[0]) < 1e-6);
}

TEST_CASE("saddle_search: unforced oscillator sits at the origin") {
  const PotentialModel p = make_linear_oscillator(1.0, 2.0, 0.0, kPi);
  SolveConfig cfg = quiet_config(41, 4);
  cfg.max_iter = 5000;
  const SolveResult r = saddle_search(p, cfg, 1.0);
  REQUIRE(r.converged);
  CHECK(std::abs(r.f_value) < 1e-12);
  CHECK_FALSE(r.nonconstant);
}

TEST_CASE("saddle_search: runaway iterates are flagged as divergence") {
  // concave potential: descent on harmonics is fine, but the mean ascends
  // -x^2 ... use F = -x1^2 so f(c) = +c^2 T grows and ascent runs away.
  const PotentialModel p = make_expr_potential("-x1^2", 1, 1.0, Lattice::none(1));
  SolveConfig cfg = quiet_config(51, 2);
  cfg.max_iter = 100000;
  const SolveResult r = saddle_search(p, cfg, 1.0);
  CHECK_FALSE(r.converged);
  CHECK(r.status == SolveStatus::Diverged);
  CHECK(r.message.find("geometry") != std::string::npos);
}

TEST_CASE("sign structure: with int F >= 0, constant saddle limits have f <= 0") {
  // soft well: int_0^T F(t,c) dt >= 0 for every constant c; the found critical
  // point is constant, so its action must not be positive.
  const PotentialModel p = make_soft_well(0.1, 1.0, 1);
  SolveConfig cfg = quiet_config(61, 6);
  cfg.max_iter = 5000;
  const SolveResult r = saddle_search(p, cfg, 5.0);
  REQUIRE(r.converged);
  if (!r.nonconstant) CHECK(r.f_value <= 1e-9);
  // contrapositive: a converged point with f > 0 would have to be nonconstant
  if (r.f_value > 1e-9) CHECK(r.nonconstant);
}

TEST_CASE("check_saddle_geometry: soft well linking inequality") {
  const PotentialModel p = make_soft_well(0.1, 1.0, 1);
  const SolveConfig cfg = quiet_config(71, 6);
  const SaddleGeometryReport g = check_saddle_geometry(p, 5.0, cfg, 0.1);
  CHECK(g.sup_sphere == Approx(-0.1 * (1.0 - std::exp(-25.0))).epsilon(1e-10));
  CHECK(g.sup_sphere < 0.0);
  CHECK(g.inf_x2_samples >= 0.0);
  CHECK(g.geometry_ok);
  CHECK(g.threshold_checked);
  CHECK(g.t_below_threshold);
  CHECK(g.t_threshold == Approx(std::sqrt(20.0) * kPi).epsilon(1e-12));
}

TEST_CASE("check_saddle_geometry: degenerate and threshold-failing cases") {
  const PotentialModel zero = make_expr_potential("0", 1, 1.0, Lattice::none(1));
  const SolveConfig cfg = quiet_config(81, 4);
  const SaddleGeometryReport g = check_saddle_geometry(zero, 1.0, cfg);
  CHECK(g.sup_sphere == Approx(0.0).scale(1.0));
  CHECK(g.inf_x2_samples == Approx(0.0).scale(1.0));  // u = 0 is in the sample
  CHECK_FALSE(g.geometry_ok);                         // sup < inf fails (degenerate)

  const PotentialModel slow = make_soft_well(0.1, 20.0, 1);
  const SaddleGeometryReport g2 = check_saddle_geometry(slow, 5.0, cfg, 0.1);
  CHECK(g2.threshold_checked);
  CHECK_FALSE(g2.t_below_threshold);  // 20 > sqrt(2/0.1) pi ~ 14.05
}

TEST_CASE("minimizing_sequence_diagnostic: healthy pendulum run passes all checks") {
  const PotentialModel p = make_pendulum(1.0, cos_forcing(1.0, 0.3));
  const SolveConfig cfg = quiet_config(91, 8);
  std::mt19937_64 rng(cfg.seed);
  const FourierTrajectory u0 = random_trajectory(1.0, 1, 8, p.lattice, rng);
  const SolveResult r = minimize_direct(u0, p, p.lattice, cfg);
  REQUIRE(r.converged);

  const SequenceDiagnostic d =
      minimizing_sequence_diagnostic(r, p.lattice, CoercivityConstants{0.1, 1.625});
  CHECK(d.tilde_norm_bounded.checked);
  CHECK(d.tilde_norm_bounded.passed);
  CHECK(d.means_in_cell.checked);
  CHECK(d.means_in_cell.passed);
  CHECK(d.cps_trend.checked);
  CHECK(d.cps_trend.passed);
  CHECK(d.all_passed());
}

TEST_CASE("minimizing_sequence_diagnostic: edge cases") {
  // single-entry trace passes trivially
  SolveResult tiny;
  tiny.trajectory = FourierTrajectory(1.0, 1, 2);
  TraceEntry e0;
  e0.mean = Vec::Zero(1);
  tiny.trace.push_back(e0);
  tiny.cps_series.push_back(1.0);
  const SequenceDiagnostic d =
      minimizing_sequence_diagnostic(tiny, Lattice::none(1), std::nullopt);
  CHECK(d.all_passed());

  // an exploding trace fails the norm-bound check
  SolveResult boom = tiny;
  for (int i = 1; i <= 40; ++i) {
    TraceEntry e;
    e.iter = i;
    e.f = 0.0;
    e.tilde_h1 = std::pow(10.0, i);
    e.mean = Vec::Zero(1);
    boom.trace.push_back(e);
    boom.cps_series.push_back(1.0);
  }
  const SequenceDiagnostic db =
      minimizing_sequence_diagnostic(boom, Lattice::none(1), CoercivityConstants{0.1, 1.0});
  CHECK(db.tilde_norm_bounded.checked);
  CHECK_FALSE(db.tilde_norm_bounded.passed);

  // empty trace violates the precondition
  SolveResult empty;
  CHECK_THROWS_AS(minimizing_sequence_diagnostic(empty, Lattice::none(1), std::nullopt),
                  std::invalid_argument);
}

TEST_CASE("solve config validation") {
  SolveConfig bad;
  bad.grad_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SolveConfig{};
  bad.max_iter = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SolveConfig{};
  bad.quadrature_K = 8;
  bad.harmonics_M = 8;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
