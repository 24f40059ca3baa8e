#include "actionforge/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace actionforge {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Lattice Lattice::cubic(int dim, double period) {
  Lattice l;
  l.periods.assign(static_cast<std::size_t>(dim), period);
  return l;
}

bool Lattice::has_any() const {
  for (const auto& p : periods) {
    if (p.has_value()) return true;
  }
  return false;
}

void Lattice::validate() const {
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (periods[i] && !(*periods[i] > 0.0 && std::isfinite(*periods[i]))) {
      throw std::invalid_argument("lattice period " + std::to_string(i + 1) + " must be > 0");
    }
  }
}

FourierTrajectory::FourierTrajectory(double period, int dim, int harmonics)
    : period_(period), dim_(dim), harmonics_(harmonics) {
  if (!(period > 0.0) || !std::isfinite(period)) throw std::invalid_argument("period must be > 0");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (harmonics < 0) throw std::invalid_argument("harmonics must be >= 0");
  coeffs_ = Vec::Zero(coeff_count());
}

FourierTrajectory FourierTrajectory::from_coefficients(double period, int dim, int harmonics, Vec coeffs) {
  FourierTrajectory u(period, dim, harmonics);
  if (coeffs.size() != u.coeff_count()) {
    throw std::invalid_argument("coefficient vector has size " + std::to_string(coeffs.size()) +
                                ", expected " + std::to_string(u.coeff_count()));
  }
  u.coeffs_ = std::move(coeffs);
  return u;
}

double FourierTrajectory::omega(int k) const { return kTwoPi * k / period_; }

void FourierTrajectory::set_mean(const Vec& m) {
  if (m.size() != dim_) throw std::invalid_argument("mean has wrong dimension");
  coeffs_.head(dim_) = m;
}

Vec FourierTrajectory::cos_coeff(int k) const {
  return coeffs_.segment(dim_ * (2 * k - 1), dim_);
}

Vec FourierTrajectory::sin_coeff(int k) const {
  return coeffs_.segment(dim_ * (2 * k), dim_);
}

void FourierTrajectory::set_cos_coeff(int k, const Vec& a) {
  coeffs_.segment(dim_ * (2 * k - 1), dim_) = a;
}

void FourierTrajectory::set_sin_coeff(int k, const Vec& b) {
  coeffs_.segment(dim_ * (2 * k), dim_) = b;
}

Vec FourierTrajectory::evaluate(double t, int order) const {
  if (order < 0 || order > 2) throw std::invalid_argument("order must be 0, 1 or 2");
  Vec out = (order == 0) ? Vec(mean()) : Vec(Vec::Zero(dim_));
  for (int k = 1; k <= harmonics_; ++k) {
    const double w = omega(k);
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    const auto a = coeffs_.segment(dim_ * (2 * k - 1), dim_);
    const auto b = coeffs_.segment(dim_ * (2 * k), dim_);
    switch (order) {
      case 0: out += a * c + b * s; break;
      case 1: out += w * (b * c - a * s); break;
      case 2: out += -w * w * (a * c + b * s); break;
    }
  }
  return out;
}

std::pair<Vec, FourierTrajectory> FourierTrajectory::decompose() const {
  FourierTrajectory tilde = *this;
  tilde.coeffs_.head(dim_).setZero();
  return {mean(), std::move(tilde)};
}

double FourierTrajectory::kinetic_energy() const {
  double sum = 0.0;
  for (int k = 1; k <= harmonics_; ++k) {
    const double w = omega(k);
    sum += w * w * (cos_coeff(k).squaredNorm() + sin_coeff(k).squaredNorm());
  }
  return 0.25 * period_ * sum;
}

double FourierTrajectory::l2_squared() const {
  double sum = period_ * mean().squaredNorm();
  for (int k = 1; k <= harmonics_; ++k) {
    sum += 0.5 * period_ * (cos_coeff(k).squaredNorm() + sin_coeff(k).squaredNorm());
  }
  return sum;
}

int sup_sampling_nodes(int harmonics) { return std::max(512, 16 * harmonics); }

FourierTrajectory::Norms FourierTrajectory::norms() const {
  Norms n{};
  n.h1_equiv = std::sqrt(2.0 * kinetic_energy()) + period_ * mean().norm();
  n.l2 = std::sqrt(l2_squared());
  n.sup = 0.0;
  const int K = sup_sampling_nodes(harmonics_);
  for (int j = 0; j < K; ++j) {
    n.sup = std::max(n.sup, evaluate(period_ * j / K).norm());
  }
  return n;
}

std::vector<Vec> FourierTrajectory::sample(int K) const {
  if (K < 1) throw std::invalid_argument("sample count must be >= 1");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) out.push_back(evaluate(period_ * j / K));
  return out;
}

FourierTrajectory FourierTrajectory::from_samples(const std::vector<Vec>& values, double period, int harmonics) {
  const int K = static_cast<int>(values.size());
  if (K < 1) throw std::invalid_argument("from_samples needs at least one sample");
  if (K < 2 * harmonics + 1) {
    throw std::invalid_argument("aliasing: " + std::to_string(K) + " samples cannot resolve " +
                                std::to_string(harmonics) + " harmonics (need K >= 2M+1)");
  }
  const int N = static_cast<int>(values.front().size());
  for (const auto& v : values) {
    if (v.size() != N) throw std::invalid_argument("samples have inconsistent dimensions");
  }

  FourierTrajectory u(period, N, harmonics);
  Vec mean = Vec::Zero(N);
  for (const auto& v : values) mean += v;
  mean /= K;
  u.set_mean(mean);

  for (int k = 1; k <= harmonics; ++k) {
    Vec a = Vec::Zero(N), b = Vec::Zero(N);
    for (int j = 0; j < K; ++j) {
      const double phase = kTwoPi * k * j / K;
      a += values[static_cast<std::size_t>(j)] * std::cos(phase);
      b += values[static_cast<std::size_t>(j)] * std::sin(phase);
    }
    u.set_cos_coeff(k, a * (2.0 / K));
    u.set_sin_coeff(k, b * (2.0 / K));
  }
  return u;
}

FourierTrajectory FourierTrajectory::with_harmonics(int harmonics) const {
  FourierTrajectory out(period_, dim_, harmonics);
  const int keep = std::min(harmonics, harmonics_);
  out.coeffs_.head(dim_ * (2 * keep + 1)) = coeffs_.head(dim_ * (2 * keep + 1));
  return out;
}

FourierTrajectory FourierTrajectory::reduced_mean_to_cell(const Lattice& lattice) const {
  if (static_cast<int>(lattice.periods.size()) != dim_ && !lattice.periods.empty()) {
    throw std::invalid_argument("lattice dimension does not match trajectory");
  }
  FourierTrajectory out = *this;
  Vec m = mean();
  for (int i = 0; i < dim_ && i < static_cast<int>(lattice.periods.size()); ++i) {
    if (!lattice.periods[static_cast<std::size_t>(i)]) continue;
    const double Ti = *lattice.periods[static_cast<std::size_t>(i)];
    double r = m[i] - std::floor(m[i] / Ti) * Ti;
    if (r >= Ti || r < 0.0) r = 0.0;  // guards the rounding edge at r == Ti
    m[i] = r;
  }
  out.set_mean(m);
  return out;
}

}  // namespace actionforge
