#include "actionforge/potential.hpp"

#include "actionforge/expr.hpp"
#include "actionforge/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace actionforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_value(const PotentialModel& p, double t, const Vec& x) {
  try {
    const double v = p.value(t, x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

Vec safe_gradient(const PotentialModel& p, double t, const Vec& x) {
  try {
    Vec g = p.gradient(t, x);
    if (!g.allFinite()) g.fill(std::numeric_limits<double>::quiet_NaN());
    return g;
  } catch (const std::exception&) {
    return Vec::Constant(p.dim, std::numeric_limits<double>::quiet_NaN());
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

/// Lexicographic odometer over the tensor-product x grid.
class XGridIterator {
 public:
  XGridIterator(const std::vector<double>& axis, int dim)
      : axis_(axis), idx_(static_cast<std::size_t>(dim), 0), x_(dim) {
    for (int i = 0; i < dim; ++i) x_[i] = axis_[0];
  }

  const Vec& x() const { return x_; }

  bool advance() {
    for (int i = static_cast<int>(idx_.size()) - 1; i >= 0; --i) {
      auto& j = idx_[static_cast<std::size_t>(i)];
      if (++j < axis_.size()) {
        x_[i] = axis_[j];
        return true;
      }
      j = 0;
      x_[i] = axis_[0];
    }
    return false;
  }

 private:
  const std::vector<double>& axis_;
  std::vector<std::size_t> idx_;
  Vec x_;
};

struct WorstTracker {
  double worst = -kInf;
  Witness witness;
  long samples = 0;

  /// Strict comparison keeps the first (lexicographically smallest) index on ties.
  void update(double margin, double t, const Vec& x) {
    ++samples;
    if (margin > worst) {
      worst = margin;
      witness.t = t;
      witness.x = x;
    }
  }
};

std::string box_note(const PotentialModel& p, const CheckGrid& g) {
  return "sampled t in [0," + std::to_string(p.period) + ") at " + std::to_string(g.t_nodes) +
         " nodes, x in [" + std::to_string(g.x_min) + "," + std::to_string(g.x_max) + "]^" +
         std::to_string(p.dim) + " at " + std::to_string(g.x_nodes) +
         " nodes per axis; certifies nothing beyond this domain";
}

HypothesisReport nonfinite_failure(HypothesisReport r, double t, const Vec& x, long samples) {
  r.passed = false;
  r.failure_code = "nonfinite";
  r.worst_violation = kInf;
  r.witness = Witness{t, x};
  r.samples_used = samples;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

PotentialModel make_unforced_pendulum(double a, double period) {
  if (!(a > 0.0)) throw std::invalid_argument("pendulum amplitude a must be > 0");
  if (!(period > 0.0)) throw std::invalid_argument("T must be > 0");
  PotentialModel p;
  p.name = "pendulum";
  p.period = period;
  p.dim = 1;
  p.lattice = Lattice{{kTwoPi}};
  p.value = [a](double, const Vec& x) { return -a * std::cos(x[0]); };
  p.gradient = [a](double, const Vec& x) {
    Vec g(1);
    g[0] = a * std::sin(x[0]);
    return g;
  };
  return p;
}

PotentialModel with_forcing(const PotentialModel& p, const FourierTrajectory& e) {
  if (e.dim() != p.dim) throw std::invalid_argument("forcing dimension does not match potential");
  if (e.period() != p.period) throw std::invalid_argument("forcing period does not match potential");
  PotentialModel q = p;
  auto base_value = p.value;
  auto base_gradient = p.gradient;
  q.value = [base_value, e](double t, const Vec& x) {
    return base_value(t, x) - e.evaluate(t).dot(x);
  };
  q.gradient = [base_gradient, e](double t, const Vec& x) {
    return Vec(base_gradient(t, x) - e.evaluate(t));
  };
  return q;
}

PotentialModel make_pendulum(double a, const FourierTrajectory& forcing_e) {
  if (forcing_e.dim() != 1) throw std::invalid_argument("pendulum forcing must be scalar");
  if (std::abs(forcing_e.mean()[0]) > 1e-12) {
    throw std::invalid_argument("pendulum forcing must have zero mean");
  }
  return with_forcing(make_unforced_pendulum(a, forcing_e.period()), forcing_e);
}

PotentialModel make_soft_well(double delta, double period, int dim) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  PotentialModel p;
  p.name = "soft_well";
  p.period = period;
  p.dim = dim;
  p.lattice = Lattice::none(dim);
  p.value = [delta](double, const Vec& x) { return delta * (1.0 - std::exp(-x.squaredNorm())); };
  p.gradient = [delta](double, const Vec& x) {
    return Vec(2.0 * delta * std::exp(-x.squaredNorm()) * x);
  };
  return p;
}

PotentialModel make_linear_oscillator(double omega0, double omega, double eps, double period) {
  PotentialModel p;
  p.name = "linear_oscillator";
  p.period = period;
  p.dim = 1;
  p.lattice = Lattice::none(1);
  p.value = [omega0, omega, eps](double t, const Vec& x) {
    return 0.5 * omega0 * omega0 * x[0] * x[0] - eps * std::cos(omega * t) * x[0];
  };
  p.gradient = [omega0, omega, eps](double t, const Vec& x) {
    Vec g(1);
    g[0] = omega0 * omega0 * x[0] - eps * std::cos(omega * t);
    return g;
  };
  return p;
}

PotentialModel make_expr_potential(const std::string& formula, int dim, double period,
                                   Lattice lattice) {
  if (!(period > 0.0)) throw std::invalid_argument("T must be > 0");
  if (!lattice.periods.empty() && static_cast<int>(lattice.periods.size()) != dim) {
    throw std::invalid_argument("lattice size does not match dimension");
  }
  lattice.validate();
  const expr::NodePtr ast = expr::parse(formula, dim);
  std::vector<expr::NodePtr> partials;
  partials.reserve(static_cast<std::size_t>(dim));
  for (int i = 1; i <= dim; ++i) partials.push_back(expr::differentiate(ast, i));

  PotentialModel p;
  p.name = "expr";
  p.period = period;
  p.dim = dim;
  p.lattice = lattice.periods.empty() ? Lattice::none(dim) : std::move(lattice);
  p.value = [ast](double t, const Vec& x) { return expr::eval(ast, t, x); };
  p.gradient = [partials, dim](double t, const Vec& x) {
    Vec g(dim);
    for (int i = 0; i < dim; ++i) g[i] = expr::eval(partials[static_cast<std::size_t>(i)], t, x);
    return g;
  };
  return p;
}

// ---------------------------------------------------------------------------
// Checkers
// ---------------------------------------------------------------------------

HypothesisReport check_A(const PotentialModel& p, const CheckGrid& grid) {
  HypothesisReport r;
  r.condition = "A";
  r.tolerance = grid.tolerance;
  r.domain_note = box_note(p, grid);

  const double rmax = std::max(std::abs(grid.x_min), std::abs(grid.x_max));
  const std::vector<double> slab_radii = {0.25 * rmax, 0.5 * rmax, 0.75 * rmax, rmax};
  std::vector<double> max_f(slab_radii.size(), 0.0), max_g(slab_radii.size(), 0.0);

  const auto axis = linspace(grid.x_min, grid.x_max, grid.x_nodes);
  long samples = 0;
  for (int jt = 0; jt < grid.t_nodes; ++jt) {
    const double t = p.period * jt / grid.t_nodes;
    XGridIterator it(axis, p.dim);
    do {
      const Vec& x = it.x();
      const double f = safe_value(p, t, x);
      const Vec g = safe_gradient(p, t, x);
      ++samples;
      if (std::isnan(f) || !g.allFinite()) return nonfinite_failure(std::move(r), t, x, samples);
      const double radius = x.norm();
      const double gn = g.norm();
      for (std::size_t s = 0; s < slab_radii.size(); ++s) {
        if (radius <= slab_radii[s] + 1e-12) {
          max_f[s] = std::max(max_f[s], std::abs(f));
          max_g[s] = std::max(max_g[s], gn);
        }
      }
    } while (it.advance());
  }

  for (std::size_t s = 0; s < slab_radii.size(); ++s) {
    const std::string tag = "slab" + std::to_string(s + 1);
    r.details[tag + "_radius"] = slab_radii[s];
    r.details[tag + "_max_abs_F"] = max_f[s];
    r.details[tag + "_max_abs_grad"] = max_g[s];
  }
  r.passed = true;
  r.worst_violation = 0.0;
  r.samples_used = samples;
  return r;
}

HypothesisReport check_F1(const PotentialModel& p, const CheckGrid& grid) {
  HypothesisReport r;
  r.condition = "F1";
  r.tolerance = grid.tolerance;
  r.domain_note = box_note(p, grid);

  const auto axis = linspace(grid.x_min, grid.x_max, grid.x_nodes);
  WorstTracker w;
  double max_disc = 0.0;
  for (int jt = 0; jt < grid.t_nodes; ++jt) {
    const double t = p.period * jt / grid.t_nodes;
    XGridIterator it(axis, p.dim);
    do {
      const Vec& x = it.x();
      const double f0 = safe_value(p, t, x);
      const double f1 = safe_value(p, t + p.period, x);
      if (std::isnan(f0) || std::isnan(f1)) {
        return nonfinite_failure(std::move(r), t, x, w.samples + 1);
      }
      const double disc = std::abs(f1 - f0);
      max_disc = std::max(max_disc, disc);
      w.update(disc - grid.tolerance * (1.0 + std::abs(f0)), t, x);
    } while (it.advance());
  }
  r.details["max_discrepancy"] = max_disc;
  r.worst_violation = w.worst;
  r.witness = w.witness;
  r.samples_used = w.samples;
  r.passed = w.worst <= 0.0;
  if (!r.passed) r.failure_code = "pointwise";
  return r;
}

HypothesisReport check_lattice_integral(const PotentialModel& p, const Lattice& lattice,
                                        const CheckGrid& grid) {
  if (!lattice.has_any()) throw std::invalid_argument("lattice has no periods to check");
  HypothesisReport r;
  r.condition = "F2";
  r.tolerance = grid.lattice_tolerance;
  r.domain_note = box_note(p, grid) + "; time integrals at " + std::to_string(grid.quad_nodes) +
                  " quadrature nodes";

  const auto axis = linspace(grid.x_min, grid.x_max, grid.x_nodes);
  WorstTracker w;
  double max_disc = 0.0;
  bool nonfinite = false;
  Witness nf_witness;
  for (int i = 0; i < p.dim && !nonfinite; ++i) {
    if (!lattice.periods[static_cast<std::size_t>(i)]) continue;
    const double Ti = *lattice.periods[static_cast<std::size_t>(i)];
    Vec shift = Vec::Zero(p.dim);
    shift[i] = Ti;
    XGridIterator it(axis, p.dim);
    do {
      const Vec& x = it.x();
      const Vec xs = x + shift;
      const double i0 =
          periodic_trapezoid([&](double t) { return safe_value(p, t, x); }, p.period, grid.quad_nodes);
      const double i1 = periodic_trapezoid([&](double t) { return safe_value(p, t, xs); }, p.period,
                                           grid.quad_nodes);
      if (std::isnan(i0) || std::isnan(i1)) {
        nonfinite = true;
        nf_witness = Witness{0.0, x};
        break;
      }
      const double disc = std::abs(i1 - i0);
      max_disc = std::max(max_disc, disc);
      w.update(disc - grid.lattice_tolerance * (1.0 + std::abs(i0)), 0.0, x);
    } while (it.advance());
  }
  if (nonfinite) return nonfinite_failure(std::move(r), 0.0, nf_witness.x, w.samples + 1);

  r.details["max_discrepancy"] = max_disc;
  r.worst_violation = w.worst;
  r.witness = w.witness;
  r.samples_used = w.samples;
  r.passed = w.worst <= 0.0;
  if (!r.passed) r.failure_code = "pointwise";
  return r;
}

HypothesisReport check_F3(const PotentialModel& p, double C1, double C2, const CheckGrid& grid) {
  if (!(C1 > 0.0) || !(C2 > 0.0)) throw std::invalid_argument("F3 requires C1 > 0 and C2 > 0");
  HypothesisReport r;
  r.condition = "F3";
  r.tolerance = grid.tolerance;
  r.domain_note = box_note(p, grid);

  const double threshold = 0.5 * std::pow(kTwoPi / p.period, 2);
  r.details["C1"] = C1;
  r.details["C2"] = C2;
  r.details["C1_threshold"] = threshold;
  if (!(C1 < threshold)) {
    r.passed = false;
    r.failure_code = "threshold";
    r.worst_violation = C1 - threshold;
    return r;
  }

  const auto axis = linspace(grid.x_min, grid.x_max, grid.x_nodes);
  WorstTracker w;
  for (int jt = 0; jt < grid.t_nodes; ++jt) {
    const double t = p.period * jt / grid.t_nodes;
    XGridIterator it(axis, p.dim);
    do {
      const Vec& x = it.x();
      const double f = safe_value(p, t, x);
      if (std::isnan(f)) return nonfinite_failure(std::move(r), t, x, w.samples + 1);
      const double bound = C1 * x.squaredNorm() + C2;
      w.update(std::abs(f) - bound - grid.tolerance * (1.0 + std::abs(f)), t, x);
    } while (it.advance());
  }
  r.worst_violation = w.worst;
  r.witness = w.witness;
  r.samples_used = w.samples;
  r.passed = w.worst <= 0.0;
  if (!r.passed) r.failure_code = "pointwise";
  return r;
}

HypothesisReport check_F4(const PotentialModel& p, double mu1, double mu2, const CheckGrid& grid) {
  if (!(mu1 < 2.0)) throw std::invalid_argument("F4 requires mu1 < 2");
  HypothesisReport r;
  r.condition = "F4";
  r.tolerance = grid.tolerance;
  r.domain_note = box_note(p, grid);
  r.details["mu1"] = mu1;
  r.details["mu2"] = mu2;

  const auto axis = linspace(grid.x_min, grid.x_max, grid.x_nodes);
  WorstTracker w;
  for (int jt = 0; jt < grid.t_nodes; ++jt) {
    const double t = p.period * jt / grid.t_nodes;
    XGridIterator it(axis, p.dim);
    do {
      const Vec& x = it.x();
      const double f = safe_value(p, t, x);
      const Vec g = safe_gradient(p, t, x);
      if (std::isnan(f) || !g.allFinite()) return nonfinite_failure(std::move(r), t, x, w.samples + 1);
      const double rhs = mu1 * f + mu2;
      w.update(g.dot(x) - rhs - grid.tolerance * (1.0 + std::abs(rhs)), t, x);
    } while (it.advance());
  }
  r.worst_violation = w.worst;
  r.witness = w.witness;
  r.samples_used = w.samples;
  r.passed = w.worst <= 0.0;
  if (!r.passed) r.failure_code = "pointwise";
  return r;
}

namespace {

std::vector<Vec> annulus_directions_for(int dim, int count, std::uint64_t seed) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }
  if (dim == 2) {
    for (int j = 0; j < count; ++j) {
      const double a = kTwoPi * j / count;
      Vec d(2);
      d << std::cos(a), std::sin(a);
      dirs.push_back(std::move(d));
    }
    return dirs;
  }
  if (dim == 3) {
    // Fibonacci sphere
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int j = 0; j < count; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / count;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = kTwoPi * j / golden;
      Vec d(3);
      d << rho * std::cos(a), rho * std::sin(a), z;
      dirs.push_back(std::move(d));
    }
    return dirs;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int j = 0; j < count; ++j) {
    Vec d(dim);
    do {
      for (int i = 0; i < dim; ++i) d[i] = gauss(rng);
    } while (d.norm() < 1e-8);
    dirs.push_back(d.normalized());
  }
  return dirs;
}

}  // namespace

F5F6Report check_F5_F6(const PotentialModel& p, double delta, double R, double b,
                       const CheckGrid& grid) {
  if (!(delta > 0.0)) throw std::invalid_argument("F5 requires delta > 0");
  if (!(R > 0.0)) throw std::invalid_argument("F5 requires R > 0");
  if (!(b > 0.0)) throw std::invalid_argument("F6 requires b > 0");

  F5F6Report out;
  out.t_threshold = std::sqrt(2.0 / b) * std::numbers::pi;
  out.t_below_threshold = p.period < out.t_threshold;

  // F5 on the annulus R <= |x| <= 2R: a sampled proxy for the limit statement.
  {
    HypothesisReport r;
    r.condition = "F5";
    r.tolerance = grid.tolerance;
    r.domain_note = "sampled annulus " + std::to_string(R) + " <= |x| <= " + std::to_string(2 * R) +
                    " (proxy for |x| -> infinity), t at " + std::to_string(grid.t_nodes) + " nodes";
    r.details["delta"] = delta;
    r.details["R"] = R;
    const auto dirs = annulus_directions_for(p.dim, grid.annulus_directions, grid.seed);
    const auto radii = linspace(R, 2.0 * R, grid.annulus_radii);
    WorstTracker w;
    double min_f = kInf;
    bool nonfinite = false;
    Witness nf_witness;
    double nf_t = 0;
    for (int jt = 0; jt < grid.t_nodes && !nonfinite; ++jt) {
      const double t = p.period * jt / grid.t_nodes;
      for (const auto& d : dirs) {
        for (const double rad : radii) {
          const Vec x = rad * d;
          const double f = safe_value(p, t, x);
          if (std::isnan(f)) {
            nonfinite = true;
            nf_witness.x = x;
            nf_t = t;
            break;
          }
          min_f = std::min(min_f, f);
          w.update(delta - f - grid.tolerance * (1.0 + std::abs(delta)), t, x);
        }
        if (nonfinite) break;
      }
    }
    if (nonfinite) {
      out.f5 = nonfinite_failure(std::move(r), nf_t, nf_witness.x, w.samples + 1);
    } else {
      r.details["min_F_on_annulus"] = min_f;
      r.worst_violation = w.worst;
      r.witness = w.witness;
      r.samples_used = w.samples;
      r.passed = w.worst <= 0.0;
      if (!r.passed) r.failure_code = "pointwise";
      out.f5 = std::move(r);
    }
  }

  // F6 on the box grid.
  {
    HypothesisReport r;
    r.condition = "F6";
    r.tolerance = grid.tolerance;
    r.domain_note = box_note(p, grid);
    r.details["b"] = b;
    r.details["T_threshold"] = out.t_threshold;
    const auto axis = linspace(grid.x_min, grid.x_max, grid.x_nodes);
    WorstTracker w;
    bool nonfinite = false;
    Witness nf_witness;
    double nf_t = 0;
    for (int jt = 0; jt < grid.t_nodes && !nonfinite; ++jt) {
      const double t = p.period * jt / grid.t_nodes;
      XGridIterator it(axis, p.dim);
      do {
        const Vec& x = it.x();
        const double f = safe_value(p, t, x);
        if (std::isnan(f)) {
          nonfinite = true;
          nf_witness.x = x;
          nf_t = t;
          break;
        }
        const double bound = b * x.squaredNorm();
        w.update(f - bound - grid.tolerance * (1.0 + std::abs(bound)), t, x);
      } while (it.advance());
    }
    if (nonfinite) {
      out.f6 = nonfinite_failure(std::move(r), nf_t, nf_witness.x, w.samples + 1);
    } else {
      r.worst_violation = w.worst;
      r.witness = w.witness;
      r.samples_used = w.samples;
      r.passed = w.worst <= 0.0;
      if (!r.passed) r.failure_code = "pointwise";
      out.f6 = std::move(r);
    }
  }
  return out;
}

double gradient_consistency_max_error(const PotentialModel& p, int trials, std::uint64_t seed,
                                      double box_halfwidth) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, p.period);
  std::uniform_real_distribution<double> ux(-box_halfwidth, box_halfwidth);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const double t = ut(rng);
    Vec x(p.dim);
    for (int i = 0; i < p.dim; ++i) x[i] = ux(rng);
    Vec g;
    try {
      g = p.gradient(t, x);
    } catch (const std::exception&) {
      continue;  // domain edge; consistency is only asked for away from domain errors
    }
    for (int i = 0; i < p.dim; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      double fp, fm;
      try {
        fp = p.value(t, xp);
        fm = p.value(t, xm);
      } catch (const std::exception&) {
        continue;
      }
      const double fd = (fp - fm) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
    }
  }
  return worst;
}

}  // namespace actionforge
