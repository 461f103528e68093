#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>

namespace roughlift {

class WaveletFamily;

/// Regularity/integrability pair (alpha, p) with gamma = 2 alpha - 1.
struct SobolevParams {
  double alpha;
  double p;
  double gamma;
};

/// Accepts exactly 1/3 < alpha < 1/2 and 1/alpha < p < infinity.
SobolevParams validate_params(double alpha, double p);

/// Uniformly sampled R^d-valued path on [t0, t1] with 2^level samples per
/// unit time. Row i of `values` is the point at t0 + i 2^-level.
class SampledPath {
 public:
  SampledPath() = default;
  SampledPath(Eigen::MatrixXd values, double t0, double t1, int level);

  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& values() { return values_; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  int level() const { return level_; }

  Eigen::Index samples() const { return values_.rows(); }
  Eigen::Index dim() const { return values_.cols(); }
  Eigen::Index cells() const { return values_.rows() - 1; }
  double spacing() const { return std::ldexp(1.0, -level_); }
  double time(Eigen::Index i) const { return t0_ + static_cast<double>(i) * spacing(); }
  /// Index of the sample at time t; t must be on the grid.
  Eigen::Index index_of(double t) const;

  /// Scalar path holding one coordinate.
  SampledPath component(Eigen::Index c) const;
  /// Value of the piecewise-linear interpolant (zero outside [t0, t1]).
  Eigen::VectorXd interpolate(double t) const;
  /// Restriction to [a, b] (grid points, bit-exact copy).
  SampledPath restrict(double a, double b) const;

 private:
  Eigen::MatrixXd values_;
  double t0_ = 0.0;
  double t1_ = 1.0;
  int level_ = 0;
};

/// The two terms of the fractional Sobolev norm.
struct SobolevNorm {
  double seminorm = 0.0;  // double-integral part
  double lp_term = 0.0;   // L^p distance to the reference point
  double total() const { return seminorm + lp_term; }
};

/// Fractional Sobolev norm of a sampled path; the reference point defaults
/// to the first sample.
SobolevNorm sobolev_norm_path(const SampledPath& f, const SobolevParams& params,
                              const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

/// Even reflection across both endpoints of [0,1], tapered by a C^3 cutoff
/// that is 1 on [0,1] and 0 at -1 and 2. Result lives on [-1, 2].
SampledPath extend_path(const SampledPath& f);

/// Value of the C^3 cutoff used by extend_path.
double extension_cutoff(double t);

/// Random lacunary wavelet series on [0,1], starting at 0:
///   sum_{n <= level-2} sum_k s_{n,k} 2^{-n(smoothness+1/2)} max(n,1)^{-log_decay} psi^n_k
/// with independent random signs s_{n,k}. Deterministic in (seed, level, d);
/// the signs of levels shared between two `level` values coincide.
SampledPath wavelet_series_path(double smoothness, double log_decay, std::uint64_t seed,
                                int level, Eigen::Index d, const WaveletFamily& family);

/// Synthetic W^alpha_p path: wavelet series with smoothness alpha and
/// logarithmic decay 2/p. Level is limited to 14.
SampledPath generate_sobolev_path(const SobolevParams& params, std::uint64_t seed, int level,
                                  Eigen::Index d);
SampledPath generate_sobolev_path(const SobolevParams& params, std::uint64_t seed, int level,
                                  Eigen::Index d, const WaveletFamily& family);

constexpr int kMaxGridLevel = 14;

}  // namespace roughlift
