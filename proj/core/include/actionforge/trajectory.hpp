#pragma once

#include <Eigen/Core>

#include <optional>
#include <utility>
#include <vector>

namespace actionforge {

using Vec = Eigen::VectorXd;

/// Spatial periodicity of a potential: one optional period per coordinate.
/// An empty optional means the potential is not periodic in that direction.
struct Lattice {
  std::vector<std::optional<double>> periods;

  static Lattice none(int dim) { return Lattice{std::vector<std::optional<double>>(dim)}; }

  /// Lattice with the same period in every coordinate.
  static Lattice cubic(int dim, double period);

  bool has_any() const;
  int dim() const { return static_cast<int>(periods.size()); }

  /// Throws std::invalid_argument if any present period is not positive and finite.
  void validate() const;
};

/// A T-periodic curve in R^N stored as mean + truncated Fourier series:
///
///   u(t) = mean + sum_{k=1}^{M} [ a_k cos(w_k t) + b_k sin(w_k t) ],   w_k = 2*pi*k/T.
///
/// Coefficients live in one flat vector laid out as
///   [ mean(N) | a_1(N) | b_1(N) | ... | a_M(N) | b_M(N) ]
/// which is also the gradient layout used by the action module and the
/// order used in JSON serialization.
///
/// The mean block equals (1/T) * integral of u over one period exactly, so the
/// H^1_T = X (+) R^N splitting is literal in the data layout.
class FourierTrajectory {
 public:
  /// Zero trajectory with the given discretization.
  FourierTrajectory(double period, int dim, int harmonics);

  /// Constant-zero scalar curve with period 1 (the cheap default for members).
  FourierTrajectory() : FourierTrajectory(1.0, 1, 0) {}

  static FourierTrajectory from_coefficients(double period, int dim, int harmonics, Vec coeffs);

  double period() const { return period_; }
  int dim() const { return dim_; }
  int harmonics() const { return harmonics_; }
  int coeff_count() const { return dim_ * (2 * harmonics_ + 1); }
  double omega(int k) const;

  const Vec& coefficients() const { return coeffs_; }
  Vec& coefficients() { return coeffs_; }

  Vec mean() const { return coeffs_.head(dim_); }
  void set_mean(const Vec& m);

  /// k is 1-based; valid for 1 <= k <= harmonics().
  Vec cos_coeff(int k) const;
  Vec sin_coeff(int k) const;
  void set_cos_coeff(int k, const Vec& a);
  void set_sin_coeff(int k, const Vec& b);

  /// u(t), du/dt or d2u/dt2, exact for the truncated series. order in {0,1,2}.
  Vec evaluate(double t, int order = 0) const;

  /// Splits u into (mean, zero-mean part). The tilde part reconstructs u when
  /// the mean is added back.
  std::pair<Vec, FourierTrajectory> decompose() const;

  /// (1/2) * integral of |du/dt|^2 over one period, in closed form:
  /// (T/4) * sum_k w_k^2 (|a_k|^2 + |b_k|^2). Zero iff the curve is constant.
  double kinetic_energy() const;

  struct Norms {
    double h1_equiv;  ///< ||du/dt||_L2 + |integral of u|  (the equivalent H^1 norm)
    double sup;       ///< max_t |u(t)|, resolved by dense sampling (approximate)
    double l2;        ///< (integral of |u|^2)^(1/2), closed form
  };
  Norms norms() const;

  /// integral of |u|^2 over one period, closed form.
  double l2_squared() const;

  /// Values at the K equispaced nodes t_j = j*T/K, j = 0..K-1.
  std::vector<Vec> sample(int K) const;

  /// Discrete Fourier analysis of K equispaced samples into M harmonics.
  /// Exact (round-trip identity) for band-limited data when K >= 2M+1;
  /// throws std::invalid_argument for K < 2M+1 (aliasing).
  static FourierTrajectory from_samples(const std::vector<Vec>& values, double period, int harmonics);

  /// Translates the mean by integer lattice steps so that each coordinate with
  /// a declared period lands in the half-open cell [0, T_i). Harmonics are
  /// untouched. Idempotent; a mean of exactly T_i wraps to 0.
  FourierTrajectory reduced_mean_to_cell(const Lattice& lattice) const;

  /// Same curve re-expressed with `harmonics` terms: zero-padded when grown,
  /// truncated when shrunk.
  FourierTrajectory with_harmonics(int harmonics) const;

  bool all_finite() const { return coeffs_.allFinite(); }

 private:
  double period_;
  int dim_;
  int harmonics_;
  Vec coeffs_;
};

/// Node count used when resolving sup norms by sampling: max(512, 16M).
int sup_sampling_nodes(int harmonics);

}  // namespace actionforge
