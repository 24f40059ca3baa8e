#include "actionforge/action.hpp"

#include "actionforge/quadrature.hpp"

#include <cmath>
#include <vector>

namespace actionforge {

int default_quadrature_nodes(int harmonics) { return std::max(64, 4 * (harmonics + 1)); }

namespace {

void require_nodes(const FourierTrajectory& u, const PotentialModel& p, int K) {
  if (u.dim() != p.dim) throw std::invalid_argument("trajectory and potential dimensions differ");
  if (K < 2 * u.harmonics() + 1) {
    throw std::invalid_argument("quadrature nodes K must be >= 2M+1");
  }
}

struct NodeData {
  std::vector<double> times;
  std::vector<Vec> positions;
};

NodeData sample_nodes(const FourierTrajectory& u, int K) {
  NodeData d;
  d.times.resize(static_cast<std::size_t>(K));
  d.positions.reserve(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    const double t = u.period() * j / K;
    d.times[static_cast<std::size_t>(j)] = t;
    d.positions.push_back(u.evaluate(t));
  }
  return d;
}

}  // namespace

ActionReport action_value(const FourierTrajectory& u, const PotentialModel& p, int K) {
  require_nodes(u, p, K);
  ActionReport r;
  r.nodes_K = K;
  r.kinetic = u.kinetic_energy();

  const NodeData nodes = sample_nodes(u, K);
  std::vector<double> f_vals(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    try {
      f_vals[sj] = p.value(nodes.times[sj], nodes.positions[sj]);
    } catch (const std::exception& e) {
      throw PotentialEvalError(e.what(), nodes.times[sj]);
    }
  }
  r.potential_integral = (u.period() / K) * pairwise_sum(f_vals);
  r.value = r.kinetic - r.potential_integral;
  return r;
}

ActionReport action_gradient(const FourierTrajectory& u, const PotentialModel& p, int K) {
  require_nodes(u, p, K);
  ActionReport r;
  r.nodes_K = K;
  r.kinetic = u.kinetic_energy();

  const int N = u.dim();
  const int M = u.harmonics();
  const double T = u.period();
  const NodeData nodes = sample_nodes(u, K);

  std::vector<double> f_vals(static_cast<std::size_t>(K));
  std::vector<Vec> grads;
  grads.reserve(static_cast<std::size_t>(K));
  for (int j = 0; j < K; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    try {
      f_vals[sj] = p.value(nodes.times[sj], nodes.positions[sj]);
      grads.push_back(p.gradient(nodes.times[sj], nodes.positions[sj]));
    } catch (const std::exception& e) {
      throw PotentialEvalError(e.what(), nodes.times[sj]);
    }
  }
  r.potential_integral = (T / K) * pairwise_sum(f_vals);
  r.value = r.kinetic - r.potential_integral;

  r.gradient = Vec::Zero(u.coeff_count());
  std::vector<double> buf(static_cast<std::size_t>(K));

  // mean block: -int (grad F)_i dt
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < K; ++j) buf[static_cast<std::size_t>(j)] = grads[static_cast<std::size_t>(j)][i];
    r.gradient[i] = -(T / K) * pairwise_sum(buf);
  }

  // harmonic blocks: exact kinetic term + projected potential term
  for (int k = 1; k <= M; ++k) {
    const double w = u.omega(k);
    const double kin = 0.5 * T * w * w;
    const Vec a = u.cos_coeff(k);
    const Vec b = u.sin_coeff(k);
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < K; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        buf[sj] = grads[sj][i] * std::cos(w * nodes.times[sj]);
      }
      r.gradient[N * (2 * k - 1) + i] = kin * a[i] - (T / K) * pairwise_sum(buf);
      for (int j = 0; j < K; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        buf[sj] = grads[sj][i] * std::sin(w * nodes.times[sj]);
      }
      r.gradient[N * (2 * k) + i] = kin * b[i] - (T / K) * pairwise_sum(buf);
    }
  }
  r.grad_norm = r.gradient.norm();
  return r;
}

}  // namespace actionforge
