#pragma once

#include <Eigen/Core>

#include <cmath>

namespace roughlift {

/// Node-based product rule for singular double integrals
///   \iint g(s,t) |t-s|^{-exponent} ds dt
/// on a uniform grid. Trapezoid weights per node; the diagonal band
/// |t-s| < h is excluded.
class KernelQuadrature {
 public:
  KernelQuadrature(Eigen::Index nodes, double spacing, double exponent)
      : spacing_(spacing), weight_(nodes), kernel_(nodes) {
    weight_.setConstant(spacing);
    if (nodes > 0) {
      weight_(0) *= 0.5;
      weight_(nodes - 1) *= 0.5;
    }
    kernel_(0) = 0.0;
    for (Eigen::Index lag = 1; lag < nodes; ++lag)
      kernel_(lag) = std::pow(static_cast<double>(lag) * spacing, -exponent);
  }

  Eigen::Index nodes() const { return weight_.size(); }
  double spacing() const { return spacing_; }
  double weight(Eigen::Index i) const { return weight_(i); }
  double kernel(Eigen::Index lag) const { return kernel_(lag); }

  /// Sum over i < j of w_i w_j K(j-i) g(i,j). Rows are reduced in order.
  template <typename Integrand>
  double upper(Integrand&& g) const {
    const Eigen::Index n = nodes();
    double total = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      double row = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) row += weight_(j) * kernel_(j - i) * g(i, j);
      total += weight_(i) * row;
    }
    return total;
  }

  /// Full square for integrands symmetric in (s,t).
  template <typename Integrand>
  double symmetric(Integrand&& g) const {
    return 2.0 * upper(std::forward<Integrand>(g));
  }

  /// Full square for general integrands; g(i,j) must return a pair
  /// {value at (i,j), value at (j,i)} so the two orderings share work.
  template <typename PairIntegrand>
  double ordered(PairIntegrand&& g) const {
    const Eigen::Index n = nodes();
    double total = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      double row = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const auto [forward, backward] = g(i, j);
        row += weight_(j) * kernel_(j - i) * (forward + backward);
      }
      total += weight_(i) * row;
    }
    return total;
  }

 private:
  double spacing_;
  Eigen::VectorXd weight_;
  Eigen::VectorXd kernel_;
};

}  // namespace roughlift
