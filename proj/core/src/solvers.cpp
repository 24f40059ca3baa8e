#include "actionforge/solvers.hpp"

#include "actionforge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace actionforge {

namespace {

double h1_equiv_norm(const FourierTrajectory& u) {
  return std::sqrt(2.0 * u.kinetic_energy()) + u.period() * u.mean().norm();
}

double harmonic_coeff_energy(const FourierTrajectory& u) {
  double e = 0.0;
  for (int k = 1; k <= u.harmonics(); ++k) {
    e += u.cos_coeff(k).squaredNorm() + u.sin_coeff(k).squaredNorm();
  }
  return e;
}

TraceEntry make_trace_entry(int iter, const FourierTrajectory& u, const ActionReport& rep) {
  TraceEntry e;
  e.iter = iter;
  e.f = rep.value;
  e.grad_norm = rep.grad_norm;
  e.cps = (1.0 + h1_equiv_norm(u)) * rep.grad_norm;
  e.tilde_h1 = std::sqrt(2.0 * u.kinetic_energy());
  e.mean = u.mean();
  return e;
}

void push_trace(SolveResult& r, const TraceEntry& e) {
  r.trace.push_back(e);
  r.cps_series.push_back(e.cps);
}

void finalize(SolveResult& r, const FourierTrajectory& u, const ActionReport& rep) {
  r.trajectory = u;
  r.f_value = rep.value;
  r.grad_norm = rep.grad_norm;
  r.harmonic_energy = harmonic_coeff_energy(u);
  r.nonconstant = r.harmonic_energy > 1e-8;
}

bool report_finite(const ActionReport& rep) {
  return std::isfinite(rep.value) && (rep.gradient.size() == 0 || rep.gradient.allFinite());
}

}  // namespace

void SolveConfig::validate() const {
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (memory < 1) throw std::invalid_argument("memory must be >= 1");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("armijo_c must be in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw std::invalid_argument("backtrack must be in (0,1)");
  if (!(descent_step > 0.0)) throw std::invalid_argument("descent_step must be > 0");
  if (!(ascent_step > 0.0)) throw std::invalid_argument("ascent_step must be > 0");
  if (harmonics_M < 1) throw std::invalid_argument("M must be >= 1");
  if (quadrature_K != 0 && quadrature_K < 2 * harmonics_M + 1) {
    throw std::invalid_argument("K must be >= 2M+1");
  }
}

int SolveConfig::nodes_for(int harmonics) const {
  return quadrature_K > 0 ? quadrature_K : default_quadrature_nodes(harmonics);
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::LineSearchFailure: return "line_search_failure";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::NonFinite: return "non_finite";
  }
  return "unknown";
}

FourierTrajectory random_trajectory(double period, int dim, int harmonics, const Lattice& lattice,
                                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> cell(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  FourierTrajectory u(period, dim, harmonics);
  Vec mean(dim);
  for (int i = 0; i < dim; ++i) {
    const bool periodic = i < static_cast<int>(lattice.periods.size()) &&
                          lattice.periods[static_cast<std::size_t>(i)].has_value();
    mean[i] = periodic ? cell(rng) * *lattice.periods[static_cast<std::size_t>(i)] : unit(rng);
  }
  u.set_mean(mean);
  for (int k = 1; k <= harmonics; ++k) {
    const double scale = 0.1 / (k * k);
    Vec a(dim), b(dim);
    for (int i = 0; i < dim; ++i) {
      a[i] = scale * gauss(rng);
      b[i] = scale * gauss(rng);
    }
    u.set_cos_coeff(k, a);
    u.set_sin_coeff(k, b);
  }
  return u;
}

Vec gradient_preconditioner(const FourierTrajectory& u) {
  const int N = u.dim();
  Vec p = Vec::Ones(u.coeff_count());
  for (int k = 1; k <= u.harmonics(); ++k) {
    const double w = u.omega(k);
    const double scale = 1.0 / (1.0 + 0.5 * u.period() * w * w);
    p.segment(N * (2 * k - 1), 2 * N).setConstant(scale);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Direct minimization
// ---------------------------------------------------------------------------

namespace {

struct LbfgsMemory {
  std::deque<Vec> s, y;
  std::deque<double> rho;

  void push(const Vec& si, const Vec& yi, int cap) {
    const double sy = si.dot(yi);
    if (!(sy > 1e-12 * si.norm() * yi.norm())) return;  // skip non-curvature pairs
    s.push_back(si);
    y.push_back(yi);
    rho.push_back(1.0 / sy);
    while (static_cast<int>(s.size()) > cap) {
      s.pop_front();
      y.pop_front();
      rho.pop_front();
    }
  }

  void clear() {
    s.clear();
    y.clear();
    rho.clear();
  }

  /// Two-loop recursion with the diagonal preconditioner as H0.
  Vec direction(const Vec& g, const Vec& precond) const {
    Vec q = g;
    const int m = static_cast<int>(s.size());
    std::vector<double> alpha(static_cast<std::size_t>(m));
    for (int i = m - 1; i >= 0; --i) {
      const auto si = static_cast<std::size_t>(i);
      alpha[si] = rho[si] * s[si].dot(q);
      q -= alpha[si] * y[si];
    }
    Vec r = precond.cwiseProduct(q);
    for (int i = 0; i < m; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const double beta = rho[si] * y[si].dot(r);
      r += s[si] * (alpha[si] - beta);
    }
    return -r;
  }
};

}  // namespace

SolveResult minimize_direct(const FourierTrajectory& u0, const PotentialModel& p,
                            const Lattice& lattice, const SolveConfig& cfg) {
  cfg.validate();
  lattice.validate();

  SolveResult result;
  result.config = cfg;
  result.trajectory = u0;

  if (lattice.has_any()) {
    CheckGrid quick;
    quick.t_nodes = 16;
    quick.x_nodes = 9;
    quick.quad_nodes = 64;
    result.lattice_warning = !check_lattice_integral(p, lattice, quick).passed;
  }

  const int K = cfg.nodes_for(u0.harmonics());
  FourierTrajectory u = u0;
  ActionReport rep = action_gradient(u, p, K);
  if (!report_finite(rep)) {
    result.status = SolveStatus::NonFinite;
    result.message = "action not finite at the start iterate";
    finalize(result, u, rep);
    return result;
  }
  push_trace(result, make_trace_entry(0, u, rep));

  LbfgsMemory mem;
  const Vec precond = gradient_preconditioner(u);

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    if (rep.grad_norm <= cfg.grad_tol) {
      result.converged = true;
      result.status = SolveStatus::Converged;
      break;
    }

    Vec d = mem.direction(rep.gradient, precond);
    double gd = rep.gradient.dot(d);
    if (!(gd < 0.0)) {
      mem.clear();
      d = -precond.cwiseProduct(rep.gradient);
      gd = rep.gradient.dot(d);
      if (!(gd < 0.0)) {
        result.status = SolveStatus::LineSearchFailure;
        result.message = "no descent direction (gradient degenerate)";
        break;
      }
    }

    double step = 1.0;
    bool accepted = false;
    FourierTrajectory u_trial = u;
    double f_trial = 0.0;
    for (int ls = 0; ls < cfg.max_line_search; ++ls) {
      u_trial = FourierTrajectory::from_coefficients(u.period(), u.dim(), u.harmonics(),
                                                     u.coefficients() + step * d);
      const ActionReport value_rep = action_value(u_trial, p, K);
      f_trial = value_rep.value;
      if (std::isfinite(f_trial) && f_trial <= rep.value + cfg.armijo_c * step * gd) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) {
      result.status = SolveStatus::LineSearchFailure;
      result.message = "line search found no decrease along the quasi-Newton direction";
      break;
    }

    ActionReport rep_trial = action_gradient(u_trial, p, K);
    if (!report_finite(rep_trial)) {
      result.status = SolveStatus::NonFinite;
      result.message = "action or gradient became non-finite at an accepted step";
      result.iterations = iter;
      finalize(result, u_trial, rep_trial);
      return result;
    }

    mem.push(step * d, rep_trial.gradient - rep.gradient, cfg.memory);

    // Translating the mean by lattice periods leaves f and its gradient
    // invariant for lattice potentials; the stored (s, y) pairs use the raw
    // step displacement, so the translation never enters the memory.
    u = u_trial.reduced_mean_to_cell(lattice);
    rep = rep_trial;
    result.iterations = iter;
    TraceEntry entry = make_trace_entry(iter, u, rep);
    entry.f = rep_trial.value;  // the Armijo-accepted value: exactly monotone
    push_trace(result, entry);

    if (rep.grad_norm <= cfg.grad_tol) {
      result.converged = true;
      result.status = SolveStatus::Converged;
      break;
    }
  }

  if (result.converged) {
    result.status = SolveStatus::Converged;
  } else if (result.status == SolveStatus::MaxIterations) {
    result.message = "gradient tolerance not reached within max_iter";
  }
  finalize(result, u, rep);
  return result;
}

// ---------------------------------------------------------------------------
// Saddle search
// ---------------------------------------------------------------------------

SolveResult saddle_search_from(const FourierTrajectory& u0, const PotentialModel& p,
                               const SolveConfig& cfg, double sphere_R) {
  cfg.validate();
  (void)sphere_R;  // geometry is checked separately, never assumed here

  SolveResult result;
  result.config = cfg;
  result.trajectory = u0;

  const int N = u0.dim();
  const int K = cfg.nodes_for(u0.harmonics());
  FourierTrajectory u = u0;
  const Vec precond = gradient_preconditioner(u);

  ActionReport rep = action_gradient(u, p, K);
  for (int iter = 0;; ++iter) {
    if (!report_finite(rep)) {
      result.status = SolveStatus::NonFinite;
      result.message = "action not finite along the descent-ascent iteration";
      result.iterations = iter;
      break;
    }
    push_trace(result, make_trace_entry(iter, u, rep));
    result.iterations = iter;
    if (rep.grad_norm <= cfg.grad_tol) {
      result.converged = true;
      result.status = SolveStatus::Converged;
      break;
    }
    if (iter >= cfg.max_iter) {
      result.status = SolveStatus::MaxIterations;
      result.message = "gradient tolerance not reached within max_iter";
      break;
    }

    Vec& c = u.coefficients();
    c.head(N) += cfg.ascent_step * rep.gradient.head(N);
    const int tail = u.coeff_count() - N;
    c.tail(tail) -=
        cfg.descent_step * precond.tail(tail).cwiseProduct(rep.gradient.tail(tail));

    if (c.norm() > cfg.divergence_norm) {
      result.status = SolveStatus::Diverged;
      result.message =
          "iterates exceeded the divergence bound; possible violation of the "
          "saddle geometry sup_{S_R} f < inf_{X2} f";
      result.iterations = iter + 1;
      break;
    }
    rep = action_gradient(u, p, K);
  }

  finalize(result, u, rep);
  return result;
}

SolveResult saddle_search(const PotentialModel& p, const SolveConfig& cfg, double sphere_R) {
  std::mt19937_64 rng(cfg.seed);
  const FourierTrajectory u0 =
      random_trajectory(p.period, p.dim, cfg.harmonics_M, p.lattice, rng);
  return saddle_search_from(u0, p, cfg, sphere_R);
}

// ---------------------------------------------------------------------------
// Geometry and sequence diagnostics
// ---------------------------------------------------------------------------

SaddleGeometryReport check_saddle_geometry(const PotentialModel& p, double R,
                                           const SolveConfig& cfg, std::optional<double> b) {
  if (!(R > 0.0)) throw std::invalid_argument("R must be > 0");
  SaddleGeometryReport rep;
  rep.sphere_R = R;

  const int quad = std::max(256, cfg.quadrature_K);
  auto f_constant = [&](const Vec& c) {
    return -periodic_trapezoid([&](double t) { return p.value(t, c); }, p.period, quad);
  };

  // sup of f over the sphere |c| = R: dense directions for N <= 3, random beyond.
  std::vector<Vec> dirs;
  if (p.dim == 1) {
    dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  } else {
    std::mt19937_64 rng(cfg.seed + 1);
    std::normal_distribution<double> gauss;
    const int count = (p.dim == 2) ? 256 : 512;
    if (p.dim == 2) {
      for (int j = 0; j < count; ++j) {
        const double a = 2.0 * std::numbers::pi * j / count;
        Vec d(2);
        d << std::cos(a), std::sin(a);
        dirs.push_back(std::move(d));
      }
    } else if (p.dim == 3) {
      const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
      for (int j = 0; j < count; ++j) {
        const double z = 1.0 - 2.0 * (j + 0.5) / count;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = 2.0 * std::numbers::pi * j / golden;
        Vec d(3);
        d << rho * std::cos(a), rho * std::sin(a), z;
        dirs.push_back(std::move(d));
      }
    } else {
      for (int j = 0; j < count; ++j) {
        Vec d(p.dim);
        do {
          for (int i = 0; i < p.dim; ++i) d[i] = gauss(rng);
        } while (d.norm() < 1e-8);
        dirs.push_back(d.normalized());
      }
    }
  }
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& d : dirs) sup = std::max(sup, f_constant(R * d));
  rep.sup_sphere = sup;
  rep.samples_used = static_cast<long>(dirs.size());

  // inf of f over zero-mean samples of bounded kinetic energy (u = 0 included).
  const int M = std::max(1, cfg.harmonics_M);
  const int K = cfg.nodes_for(M);
  std::mt19937_64 rng(cfg.seed + 2);
  std::uniform_real_distribution<double> log_energy(-4.0, 1.0);
  double inf = action_value(FourierTrajectory(p.period, p.dim, M), p, K).value;
  const int x2_samples = 200;
  for (int s = 0; s < x2_samples; ++s) {
    FourierTrajectory u = random_trajectory(p.period, p.dim, M, Lattice::none(p.dim), rng);
    u.set_mean(Vec::Zero(p.dim));
    const double ke = u.kinetic_energy();
    if (ke > 0.0) {
      const double target = std::pow(10.0, log_energy(rng));
      u.coefficients() *= std::sqrt(target / ke);
      u.set_mean(Vec::Zero(p.dim));
    }
    inf = std::min(inf, action_value(u, p, K).value);
  }
  rep.inf_x2_samples = inf;
  rep.samples_used += x2_samples + 1;
  rep.geometry_ok = rep.sup_sphere < rep.inf_x2_samples;

  if (b) {
    rep.threshold_checked = true;
    rep.t_threshold = std::sqrt(2.0 / *b) * std::numbers::pi;
    rep.t_below_threshold = p.period < rep.t_threshold;
  }
  return rep;
}

bool SequenceDiagnostic::all_passed() const {
  return tilde_norm_bounded.passed && means_in_cell.passed && cps_trend.passed;
}

SequenceDiagnostic minimizing_sequence_diagnostic(const SolveResult& result,
                                                  const Lattice& lattice,
                                                  std::optional<CoercivityConstants> constants) {
  SequenceDiagnostic d;
  if (result.trace.empty()) throw std::invalid_argument("trace is empty");
  const double T = result.trajectory.period();

  // (i) coercivity bound on the zero-mean parts, when (F3) constants are given
  if (constants) {
    const double C1 = constants->C1;
    const double C2 = constants->C2;
    const double pw = std::pow(T / (2.0 * std::numbers::pi), 2);
    const double coeff = 0.5 - C1 * pw;
    if (coeff > 0.0) {
      d.tilde_norm_bounded.checked = true;
      double f_max = -std::numeric_limits<double>::infinity();
      double mean_sq_max = 0.0;
      for (const auto& e : result.trace) {
        f_max = std::max(f_max, e.f);
        mean_sq_max = std::max(mean_sq_max, e.mean.squaredNorm());
      }
      double mean_bound_sq = mean_sq_max;
      if (lattice.has_any()) {
        double cell_sq = 0.0;
        for (const auto& pd : lattice.periods) cell_sq += pd ? (*pd) * (*pd) : 0.0;
        mean_bound_sq = std::max(mean_bound_sq, cell_sq);
      }
      const double bound_sq = (f_max + C2 * T + C1 * T * mean_bound_sq) / coeff;
      double worst = 0.0;
      for (const auto& e : result.trace) {
        worst = std::max(worst, e.tilde_h1 * e.tilde_h1);
      }
      d.tilde_norm_bounded.detail = bound_sq > 0 ? worst / bound_sq : (worst > 0 ? 1e300 : 0.0);
      d.tilde_norm_bounded.passed = worst <= bound_sq * (1.0 + 1e-9) + 1e-12;
    }
  }

  // (ii) means confined to the fundamental cell
  if (lattice.has_any()) {
    d.means_in_cell.checked = true;
    double worst = 0.0;
    for (const auto& e : result.trace) {
      for (int i = 0; i < e.mean.size() && i < static_cast<int>(lattice.periods.size()); ++i) {
        if (!lattice.periods[static_cast<std::size_t>(i)]) continue;
        const double Ti = *lattice.periods[static_cast<std::size_t>(i)];
        worst = std::max(worst, std::max(-e.mean[i], e.mean[i] - Ti));
      }
    }
    d.means_in_cell.detail = worst;
    d.means_in_cell.passed = worst <= 1e-9;
  }

  // (iii) smoothed (CPS) monitor decreasing in trend
  {
    d.cps_trend.checked = true;
    const auto& cps = result.cps_series;
    const int window = 10;
    const int n = static_cast<int>(cps.size());
    if (n > window) {
      std::vector<double> smooth;
      for (int j = 0; j + window <= n; ++j) {
        double s = 0.0;
        for (int i = 0; i < window; ++i) s += cps[static_cast<std::size_t>(j + i)];
        smooth.push_back(s / window);
      }
      double worst_ratio = 0.0;
      for (std::size_t j = 0; j + 1 < smooth.size(); ++j) {
        if (smooth[j] > 0.0) worst_ratio = std::max(worst_ratio, smooth[j + 1] / smooth[j]);
      }
      d.cps_trend.detail = worst_ratio;
      d.cps_trend.passed = worst_ratio <= 1.2 && smooth.back() <= smooth.front() + 1e-14;
    }
  }
  return d;
}

}  // namespace actionforge
