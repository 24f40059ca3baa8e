#pragma once

#include "actionforge/potential.hpp"
#include "actionforge/trajectory.hpp"

#include <stdexcept>

namespace actionforge {

/// Thrown when the potential cannot be evaluated at a quadrature node; carries
/// the node time so callers can report where integration failed.
struct PotentialEvalError : std::runtime_error {
  PotentialEvalError(const std::string& what, double t_node)
      : std::runtime_error(what + " at quadrature node t = " + std::to_string(t_node)),
        node_time(t_node) {}
  double node_time;
};

/// Value and exact coefficient-space gradient of the action
///   f(u) = int_0^T [ (1/2)|u'|^2 - F(t, u(t)) ] dt
/// over the truncated Fourier basis. The gradient layout matches
/// FourierTrajectory::coefficients(): [ mean(N) | a_1(N) | b_1(N) | ... ].
struct ActionReport {
  double value = 0.0;
  double kinetic = 0.0;             ///< closed form, exact for the truncated series
  double potential_integral = 0.0;  ///< trapezoid quadrature at nodes_K periodic nodes
  Vec gradient;                     ///< empty unless produced by action_gradient
  double grad_norm = 0.0;
  int nodes_K = 0;

  /// value - (kinetic - potential_integral) is zero by construction; kept as a
  /// consistency probe for deserialized reports.
  double defect() const { return value - (kinetic - potential_integral); }
};

/// max(64, 4(M+1)) — enough nodes for spectral accuracy with M harmonics.
int default_quadrature_nodes(int harmonics);

/// Requires K >= 2M+1. Throws PotentialEvalError on a domain error at a node.
ActionReport action_value(const FourierTrajectory& u, const PotentialModel& p, int K);

/// Same prerequisites; also fills `gradient` with
///   d f / d mean_i   = -int (grad F)_i dt
///   d f / d a_{k,i}  = (T/2) w_k^2 a_{k,i} - int (grad F)_i cos(w_k t) dt
///   d f / d b_{k,i}  = (T/2) w_k^2 b_{k,i} - int (grad F)_i sin(w_k t) dt
/// i.e. the Riesz representation of the action derivative in the truncated
/// basis, with the kinetic block exact and the potential block by quadrature.
ActionReport action_gradient(const FourierTrajectory& u, const PotentialModel& p, int K);

}  // namespace actionforge
