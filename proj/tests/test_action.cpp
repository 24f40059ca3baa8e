#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "actionforge/action.hpp"
#include "actionforge/potential.hpp"
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

FourierTrajectory constant_traj(double period, double c, int harmonics = 2) {
  FourierTrajectory u(period, 1, harmonics);
  u.set_mean(Vec::Constant(1, c));
  return u;
}

}  // namespace

TEST_CASE("action_value: closed-form constants for the unforced pendulum") {
  // f(const c) = -int F = a T cos c
  const PotentialModel p = make_unforced_pendulum(1.0, 1.0);
  CHECK(action_value(constant_traj(1.0, 0.0), p, 64).value == Approx(1.0).epsilon(1e-12));
  CHECK(action_value(constant_traj(1.0, kPi), p, 64).value == Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("action_value: kinetic cancels potential for the unit harmonic well") {
  // F = x^2/2, u = sin t, T = 2*pi: f = pi/2 - pi/2 = 0
  const PotentialModel p = make_expr_potential("0.5*x1^2", 1, kTwoPi, Lattice::none(1));
  FourierTrajectory u(kTwoPi, 1, 1);
  u.set_sin_coeff(1, Vec::Constant(1, 1.0));
  const ActionReport r = action_value(u, p, 64);
  CHECK(r.kinetic == Approx(kPi / 2.0).epsilon(1e-12));
  CHECK(r.potential_integral == Approx(kPi / 2.0).epsilon(1e-12));
  CHECK(r.value == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(r.value == r.kinetic - r.potential_integral);
}

TEST_CASE("action_value: quadrature against the plain trapezoid oracle") {
  std::mt19937_64 rng(31);
  const PotentialModel p = make_pendulum(1.2, cos_forcing(2.0, 0.4));
  for (int trial = 0; trial < 10; ++trial) {
    const FourierTrajectory u = testsupport::random_trajectory(rng, 2.0, 1, 5);
    const int K = 64;
    const ActionReport r = action_value(u, p, K);
    const double pot = testsupport::trapezoid_oracle(
        [&](double t) { return p.value(t, u.evaluate(t)); }, u.period(), K);
    CHECK(r.potential_integral == Approx(pot).epsilon(1e-12));
  }
}

TEST_CASE("action_value: spectral quadrature convergence") {
  // |f at K - f at 2K| <= 1e-10 (1 + |f|) once K >= 4(M+1) for smooth potentials
  std::mt19937_64 rng(37);
  const PotentialModel p = make_pendulum(1.0, cos_forcing(1.0, 0.3));
  for (int trial = 0; trial < 10; ++trial) {
    const FourierTrajectory u = testsupport::random_trajectory(rng, 1.0, 1, 4, 0.8);
    const int K = default_quadrature_nodes(u.harmonics());
    const double fK = action_value(u, p, K).value;
    const double f2K = action_value(u, p, 2 * K).value;
    CHECK(std::abs(fK - f2K) <= 1e-10 * (1.0 + std::abs(fK)));
  }
}

TEST_CASE("action_gradient: forced-pendulum first-harmonic projection") {
  // a=1, e(t)=cos t, T=2*pi, u = 0: df/da_1 = int cos^2 = pi
  const PotentialModel p = make_pendulum(1.0, cos_forcing(kTwoPi, 1.0));
  const FourierTrajectory u = constant_traj(kTwoPi, 0.0, 2);
  const ActionReport r = action_gradient(u, p, 64);
  REQUIRE(r.gradient.size() == 5);
  CHECK(r.gradient[1] == Approx(kPi).epsilon(1e-12));  // a_1 entry
  // mean entry: -int (sin 0 - cos t) dt = 0
  CHECK(r.gradient[0] == Approx(0.0).scale(1.0).epsilon(1e-12));
  // b_1 entry: int cos t sin t dt = 0
  CHECK(r.gradient[2] == Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("action_gradient: constant critical points have zero mean-block gradient") {
  // unforced pendulum at u = pi: grad F(t, pi) = a sin(pi) = 0
  const PotentialModel p = make_unforced_pendulum(1.0, 1.0);
  const ActionReport r = action_gradient(constant_traj(1.0, kPi), p, 64);
  CHECK(std::abs(r.gradient[0]) < 1e-14);
}

TEST_CASE("action_gradient: harmonic oscillator closed form (T/2)(w^2 - w0^2) a") {
  // F = x^2/2 (w0 = 1), u = a1 cos(t), T = 2*pi: df/da1 = pi a1 (1 - 1) = 0
  const PotentialModel p = make_expr_potential("0.5*x1^2", 1, kTwoPi, Lattice::none(1));
  FourierTrajectory u(kTwoPi, 1, 1);
  u.set_cos_coeff(1, Vec::Constant(1, 0.8));
  const ActionReport r = action_gradient(u, p, 64);
  CHECK(std::abs(r.gradient[1]) < 1e-12);

  // and for u at the second harmonic the same formula gives pi a2 (4 - 1)
  FourierTrajectory u2(kTwoPi, 1, 2);
  u2.set_cos_coeff(2, Vec::Constant(1, 0.8));
  const ActionReport r2 = action_gradient(u2, p, 64);
  CHECK(r2.gradient[3] == Approx(kPi * 0.8 * 3.0).epsilon(1e-12));
}

TEST_CASE("action_gradient: matches central finite differences") {
  std::mt19937_64 rng(41);
  std::vector<PotentialModel> pool;
  pool.push_back(make_pendulum(1.0, cos_forcing(1.3, 0.3)));
  pool.push_back(make_soft_well(0.2, 1.3, 2));
  pool.push_back(make_expr_potential("0.5*x1^2 - cos(t)*x1", 1, 1.3, Lattice::none(1)));
  pool.push_back(make_expr_potential("sin(x1)*cos(x2) + 0.1*x2^2", 2, 1.3, Lattice::none(2)));

  for (int trial = 0; trial < 12; ++trial) {
    const PotentialModel& p = pool[static_cast<std::size_t>(trial) % pool.size()];
    const int M = 1 + trial % 8;
    const FourierTrajectory u = testsupport::random_trajectory(rng, 1.3, p.dim, M, 0.7);
    const int K = default_quadrature_nodes(M);
    const ActionReport g = action_gradient(u, p, K);
    const double h = 1e-6;
    for (int idx = 0; idx < u.coeff_count(); ++idx) {
      auto f_of = [&](double v) {
        Vec c = u.coefficients();
        c[idx] = v;
        return action_value(FourierTrajectory::from_coefficients(u.period(), u.dim(), M, c), p, K)
            .value;
      };
      const double fd = testsupport::central_diff(f_of, u.coefficients()[idx], h);
      CHECK(g.gradient[idx] == Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("action: lattice translation invariance for the forced pendulum") {
  std::mt19937_64 rng(43);
  const PotentialModel p = make_pendulum(1.0, cos_forcing(1.0, 0.3));
  for (int trial = 0; trial < 20; ++trial) {
    const FourierTrajectory u = testsupport::random_trajectory(rng, 1.0, 1, 6);
    FourierTrajectory shifted = u;
    shifted.set_mean(u.mean() + Vec::Constant(1, kTwoPi));
    const double f0 = action_value(u, p, 64).value;
    const double f1 = action_value(shifted, p, 64).value;
    CHECK(std::abs(f1 - f0) <= 1e-9 * (1.0 + std::abs(f0)));
  }
}

TEST_CASE("action: domain errors carry the quadrature node time") {
  const PotentialModel p = make_expr_potential("1/x1", 1, 1.0, Lattice::none(1));
  const FourierTrajectory zero(1.0, 1, 1);
  CHECK_THROWS_AS(action_value(zero, p, 64), PotentialEvalError);
  try {
    action_value(zero, p, 64);
  } catch (const PotentialEvalError& e) {
    CHECK(e.node_time == Approx(0.0));
  }
}

TEST_CASE("action: node-count preconditions") {
  const PotentialModel p = make_unforced_pendulum(1.0, 1.0);
  const FourierTrajectory u(1.0, 1, 8);
  CHECK_THROWS_AS(action_value(u, p, 16), std::invalid_argument);  // K < 2M+1
  CHECK(default_quadrature_nodes(8) == 64);
  CHECK(default_quadrature_nodes(31) == 128);
}
