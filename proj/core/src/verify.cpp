#include "actionforge/verify.hpp"

#include "actionforge/action.hpp"
#include "actionforge/io.hpp"
#include "actionforge/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace actionforge {

int default_residual_nodes(int harmonics) { return std::max(1024, 8 * harmonics); }

VerificationReport ode_residual(const FourierTrajectory& u, const PotentialModel& p, int dense_K) {
  if (dense_K < 8 * u.harmonics()) throw std::invalid_argument("dense_K must be >= 8M");
  if (u.dim() != p.dim) throw std::invalid_argument("trajectory and potential dimensions differ");

  VerificationReport r;
  r.dense_K = dense_K;
  std::vector<double> sq(static_cast<std::size_t>(dense_K));
  double sup = 0.0;
  for (int j = 0; j < dense_K; ++j) {
    const double t = u.period() * j / dense_K;
    Vec res;
    try {
      res = u.evaluate(t, 2) + p.gradient(t, u.evaluate(t, 0));
    } catch (const std::exception& e) {
      throw PotentialEvalError(e.what(), t);
    }
    const double n = res.norm();
    sup = std::max(sup, n);
    sq[static_cast<std::size_t>(j)] = n * n;
  }
  r.residual_sup = sup;
  r.residual_l2 = std::sqrt((u.period() / dense_K) * pairwise_sum(sq));
  r.periodicity_defect = (u.evaluate(u.period()) - u.evaluate(0.0)).norm() +
                         (u.evaluate(u.period(), 1) - u.evaluate(0.0, 1)).norm();
  const auto [mean, tilde] = u.decompose();
  r.nonconstancy = std::sqrt(tilde.l2_squared());
  return r;
}

// ---------------------------------------------------------------------------
// Shooting oracle
// ---------------------------------------------------------------------------

namespace {

struct State {
  Vec q, v;
};

State rk4_flow(const PotentialModel& p, const State& z0, int steps,
               std::vector<double>* times = nullptr, std::vector<Vec>* qs = nullptr,
               std::vector<Vec>* vs = nullptr) {
  const double h = p.period / steps;
  Vec q = z0.q, v = z0.v;
  auto accel = [&p](double t, const Vec& x) { return Vec(-p.gradient(t, x)); };
  if (times) {
    times->push_back(0.0);
    qs->push_back(q);
    vs->push_back(v);
  }
  for (int s = 0; s < steps; ++s) {
    const double t = h * s;
    const Vec k1q = v;
    const Vec k1v = accel(t, q);
    const Vec k2q = v + 0.5 * h * k1v;
    const Vec k2v = accel(t + 0.5 * h, q + 0.5 * h * k1q);
    const Vec k3q = v + 0.5 * h * k2v;
    const Vec k3v = accel(t + 0.5 * h, q + 0.5 * h * k2q);
    const Vec k4q = v + h * k3v;
    const Vec k4v = accel(t + h, q + h * k3q);
    q += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (times) {
      times->push_back(h * (s + 1));
      qs->push_back(q);
      vs->push_back(v);
    }
  }
  return State{std::move(q), std::move(v)};
}

Vec pack(const State& z) {
  Vec out(z.q.size() + z.v.size());
  out << z.q, z.v;
  return out;
}

State unpack(const Vec& z, int n) { return State{z.head(n), z.tail(n)}; }

}  // namespace

ShootingResult shooting_oracle(const PotentialModel& p, const Vec& position_guess,
                               const Vec& velocity_guess, int steps) {
  if (steps < 10000) throw std::invalid_argument("shooting oracle needs at least 10^4 steps");
  if (position_guess.size() != p.dim || velocity_guess.size() != p.dim) {
    throw std::invalid_argument("initial condition dimension mismatch");
  }

  const int n = p.dim;
  const int dim2 = 2 * n;
  const double newton_tol = 1e-10;
  const int max_newton = 50;

  ShootingResult out;
  Vec z = pack(State{position_guess, velocity_guess});

  auto residual = [&](const Vec& z0) {
    const State end = rk4_flow(p, unpack(z0, n), steps);
    return Vec(pack(end) - z0);
  };

  Vec phi = residual(z);
  int it = 0;
  for (; it < max_newton; ++it) {
    if (!phi.allFinite()) {
      out.message = "shooting residual became non-finite";
      break;
    }
    if (phi.norm() <= newton_tol) {
      out.converged = true;
      break;
    }
    // forward-difference Jacobian of z -> z(T) - z
    Eigen::MatrixXd J(dim2, dim2);
    for (int j = 0; j < dim2; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(z[j]));
      Vec zj = z;
      zj[j] += h;
      J.col(j) = (residual(zj) - phi) / h;
    }
    const Vec delta = J.partialPivLu().solve(-phi);
    if (!delta.allFinite()) {
      out.message = "Newton step not finite (singular monodromy?)";
      break;
    }
    z += delta;
    phi = residual(z);
  }
  out.newton_iterations = it;
  if (!out.converged && out.message.empty()) {
    out.message = "Newton did not reach tolerance within 50 steps";
  }

  out.initial_position = z.head(n);
  out.initial_velocity = z.tail(n);
  out.periodicity_defect = phi.norm();

  // dense samples + step-halving self check of the integrator
  const State start = unpack(z, n);
  const State end_h = rk4_flow(p, start, steps, &out.times, &out.positions, &out.velocities);
  const State end_h2 = rk4_flow(p, start, 2 * steps);
  out.step_halving_check = (pack(end_h) - pack(end_h2)).norm();
  return out;
}

double oracle_sup_gap(const FourierTrajectory& u, const ShootingResult& oracle) {
  double gap = 0.0;
  for (std::size_t j = 0; j < oracle.times.size(); ++j) {
    gap = std::max(gap, (u.evaluate(oracle.times[j]) - oracle.positions[j]).norm());
  }
  return gap;
}

double refinement_delta(const SolveResult& solved, const PotentialModel& p, const Lattice& lattice,
                        bool use_saddle) {
  const FourierTrajectory& u = solved.trajectory;
  FourierTrajectory padded = u.with_harmonics(2 * u.harmonics());
  SolveConfig cfg = solved.config;
  cfg.harmonics_M = padded.harmonics();
  if (cfg.quadrature_K > 0) cfg.quadrature_K = std::max(cfg.quadrature_K, 2 * cfg.harmonics_M + 1);
  const SolveResult refined = use_saddle ? saddle_search_from(padded, p, cfg, 1.0)
                                         : minimize_direct(padded, p, lattice, cfg);
  return std::abs(refined.f_value - solved.f_value);
}

// ---------------------------------------------------------------------------
// Property suite
// ---------------------------------------------------------------------------

namespace {

FourierTrajectory random_suite_trajectory(std::mt19937_64& rng, double& period_out) {
  std::uniform_real_distribution<double> uT(0.5, 10.0);
  std::uniform_int_distribution<int> uN(1, 3);
  std::uniform_int_distribution<int> uM(1, 8);
  const double T = uT(rng);
  period_out = T;
  const int N = uN(rng);
  const int M = uM(rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FourierTrajectory u(T, N, M);
  Vec mean(N);
  for (int i = 0; i < N; ++i) mean[i] = gauss(rng);
  u.set_mean(mean);
  for (int k = 1; k <= M; ++k) {
    Vec a(N), b(N);
    for (int i = 0; i < N; ++i) {
      a[i] = gauss(rng) / (k * k);
      b[i] = gauss(rng) / (k * k);
    }
    u.set_cos_coeff(k, a);
    u.set_sin_coeff(k, b);
  }
  return u;
}

}  // namespace

PropertySuiteReport property_suite(int trials, std::uint64_t seed,
                                   const std::optional<PotentialModel>& lattice_potential) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  PropertySuiteReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.pw_min_slack_rel = std::numeric_limits<double>::infinity();
  rep.sobolev_worst_margin_rel = std::numeric_limits<double>::infinity();

  auto record_failure = [&rep](int trial, const std::string& check, const FourierTrajectory& u) {
    ++rep.failures;
    if (rep.failure_records.size() < 32) {
      rep.failure_records.push_back({trial, check, to_json(u).dump()});
    }
  };

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    double T = 1.0;
    FourierTrajectory u = random_suite_trajectory(rng, T);
    auto [mean, tilde] = u.decompose();

    // Poincare-Wirtinger: int |u'|^2 >= (2pi/T)^2 int |u|^2 for zero-mean u.
    const double deriv_sq = 2.0 * tilde.kinetic_energy();
    const double omega1 = 2.0 * std::numbers::pi / T;
    const double pw_slack =
        (deriv_sq - omega1 * omega1 * tilde.l2_squared()) / std::max(deriv_sq, 1e-300);
    rep.pw_min_slack_rel = std::min(rep.pw_min_slack_rel, pw_slack);
    if (pw_slack < -1e-12) record_failure(trial, "poincare_wirtinger", tilde);

    // Sobolev: sup |u| <= sqrt(T/12) ||u'||_L2 for zero-mean u.
    const double bound = std::sqrt(T / 12.0) * std::sqrt(deriv_sq);
    const double sup = tilde.norms().sup;
    const double sobolev_margin = (bound - sup) / (1.0 + bound);
    rep.sobolev_worst_margin_rel = std::min(rep.sobolev_worst_margin_rel, sobolev_margin);
    if (sobolev_margin < -1e-9) record_failure(trial, "sobolev", tilde);

    // Equality case: pure first harmonic meets Poincare-Wirtinger exactly.
    {
      FourierTrajectory h1(T, u.dim(), 1);
      std::normal_distribution<double> gauss(0.0, 1.0);
      Vec a(u.dim()), b(u.dim());
      for (int i = 0; i < u.dim(); ++i) {
        a[i] = gauss(rng);
        b[i] = gauss(rng);
      }
      h1.set_cos_coeff(1, a);
      h1.set_sin_coeff(1, b);
      const double d2 = 2.0 * h1.kinetic_energy();
      const double defect = std::abs(d2 - omega1 * omega1 * h1.l2_squared()) / std::max(d2, 1e-300);
      rep.equality_worst_defect = std::max(rep.equality_worst_defect, defect);
      if (defect > 1e-12) record_failure(trial, "pw_equality_case", h1);
    }

    // DFT analysis/synthesis round trip at the critical node count 2M+1.
    {
      const int K = 2 * u.harmonics() + 1;
      const FourierTrajectory back = FourierTrajectory::from_samples(u.sample(K), T, u.harmonics());
      const double scale = 1.0 + u.coefficients().cwiseAbs().maxCoeff();
      const double err =
          (back.coefficients() - u.coefficients()).cwiseAbs().maxCoeff() / scale;
      rep.roundtrip_worst = std::max(rep.roundtrip_worst, err);
      if (err > 1e-12) record_failure(trial, "dft_roundtrip", u);
    }

    // Action gradient vs central differences on a smooth lattice potential.
    if (trial % 10 == 0) {
      const PotentialModel pend = make_soft_well(0.3, T, u.dim());
      const int K = default_quadrature_nodes(u.harmonics());
      const ActionReport g = action_gradient(u, pend, K);
      std::uniform_int_distribution<int> pick(0, u.coeff_count() - 1);
      const double h = 1e-6;
      double worst = 0.0;
      for (int probe = 0; probe < 5; ++probe) {
        const int idx = pick(rng);
        Vec cp = u.coefficients(), cm = u.coefficients();
        cp[idx] += h;
        cm[idx] -= h;
        const double fp =
            action_value(FourierTrajectory::from_coefficients(T, u.dim(), u.harmonics(), cp), pend, K)
                .value;
        const double fm =
            action_value(FourierTrajectory::from_coefficients(T, u.dim(), u.harmonics(), cm), pend, K)
                .value;
        const double fd = (fp - fm) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - g.gradient[idx]) / std::max(1.0, std::abs(g.gradient[idx])));
      }
      rep.grad_fd_worst = std::max(rep.grad_fd_worst, worst);
      if (worst > 1e-6) record_failure(trial, "gradient_fd", u);
    }

    // Translation invariance for the supplied lattice potential.
    if (lattice_potential && trial % 10 == 0) {
      const PotentialModel& lp = *lattice_potential;
      int dir = -1;
      for (int i = 0; i < lp.dim; ++i) {
        if (lp.lattice.periods[static_cast<std::size_t>(i)]) {
          dir = i;
          break;
        }
      }
      if (dir >= 0) {
        rep.translation_checked = true;
        std::mt19937_64 rng2(seed + 7919 + static_cast<std::uint64_t>(trial));
        FourierTrajectory w =
            random_trajectory(lp.period, lp.dim, 6, Lattice::none(lp.dim), rng2);
        const int K = default_quadrature_nodes(w.harmonics());
        const double f0 = action_value(w, lp, K).value;
        FourierTrajectory shifted = w;
        Vec m = shifted.mean();
        m[dir] += *lp.lattice.periods[static_cast<std::size_t>(dir)];
        shifted.set_mean(m);
        const double f1 = action_value(shifted, lp, K).value;
        const double err = std::abs(f1 - f0) / (1.0 + std::abs(f0));
        rep.translation_worst = std::max(rep.translation_worst, err);
        if (err > 1e-9) record_failure(trial, "translation_invariance", w);
      }
    }
  }

  rep.all_passed = rep.failures == 0;
  return rep;
}

}  // namespace actionforge
