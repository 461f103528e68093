#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roughlift/path_space.hpp"

namespace roughlift {

enum class WaveletKind { DB6, DB8 };

std::string_view to_string(WaveletKind kind);
/// Accepts "db6"/"db8" (case-insensitive).
WaveletKind parse_wavelet(std::string_view name);

/// Orthonormal extremal-phase Daubechies low-pass filter with the given
/// number of vanishing moments (2N taps, sum sqrt(2)), by spectral
/// factorisation of the Daubechies polynomial.
Eigen::VectorXd daubechies_filter(int vanishing_moments);

enum class Basis { Father, Mother };

/// Which antiderivative/derivative of a tabulated function to evaluate.
enum class Order { Derivative, Value, Primitive, SecondPrimitive };

/// Father/mother wavelet pair tabulated on the dyadic grid of depth
/// `refine_depth` over the common support [support_lo, support_hi].
/// Immutable after construction.
class WaveletFamily {
 public:
  WaveletFamily(WaveletKind kind, int refine_depth);

  WaveletKind kind() const { return kind_; }
  int refine_depth() const { return refine_depth_; }
  int vanishing_moments() const { return vanishing_moments_; }
  /// Hoelder regularity of phi and psi.
  double regularity() const { return regularity_; }
  /// Refinement coefficients a_k, phi(x) = sum_k a_k phi(2x - k), sum a_k = 2.
  const Eigen::VectorXd& filter() const { return filter_; }
  double support_lo() const { return support_lo_; }
  double support_hi() const { return support_hi_; }
  double support_radius() const { return 0.5 * (support_hi_ - support_lo_); }
  /// Sup-norm change in the last cascade sweep.
  double cascade_residual() const { return cascade_residual_; }

  Eigen::Index grid_size() const { return grid_size_; }
  double grid_point(Eigen::Index j) const;
  const Eigen::VectorXd& table(Basis basis, Order order) const;

  /// Evaluates phi/psi (or a derivative/primitive) at x. Primitives are
  /// taken from -infinity, so they are constant beyond the support
  /// (second primitives grow linearly there).
  double eval(Basis basis, Order order, double x) const;

  /// margin r_reg - |alpha - 1 - 1/p|; must be positive.
  double regularity_margin(const SobolevParams& params) const;

 private:
  WaveletKind kind_;
  int refine_depth_;
  int vanishing_moments_;
  double regularity_;
  Eigen::VectorXd filter_;
  double support_lo_ = 0.0;
  double support_hi_ = 0.0;
  double cascade_residual_ = 0.0;
  Eigen::Index grid_size_ = 0;
  // indexed [basis][order]
  Eigen::VectorXd tables_[2][4];
};

/// Tabulated family; refine_depth must be in [8, 14].
WaveletFamily build_family(WaveletKind kind, int refine_depth);

/// Lazily built DB8 family at refine depth 12, shared process-wide.
const WaveletFamily& default_family();

/// x = 2^{-n} k in Lambda_n.
struct DyadicIndex {
  int n = 0;
  std::int64_t k = 0;
  double x() const { return std::ldexp(static_cast<double>(k), -n); }
};

/// Translations k at level n whose wavelet support meets (a, b).
std::pair<std::int64_t, std::int64_t> translation_range(const WaveletFamily& family, int n,
                                                        double a, double b);

/// Coefficients at one level over the contiguous range [k_min, k_min + size).
struct CoefficientLevel {
  std::int64_t k_min = 0;
  Eigen::VectorXd coeffs;

  std::int64_t k_max() const { return k_min + static_cast<std::int64_t>(coeffs.size()) - 1; }
  double at(std::int64_t k) const {
    const auto i = k - k_min;
    return (i < 0 || i >= coeffs.size()) ? 0.0 : coeffs(static_cast<Eigen::Index>(i));
  }
};

/// Wavelet coefficients on a window: level-0 father coefficients (`base`)
/// and mother coefficients for levels 0..N.
struct CoefficientPyramid {
  double window_lo = 0.0;
  double window_hi = 1.0;
  CoefficientLevel base;
  std::vector<CoefficientLevel> levels;

  int top_level() const { return static_cast<int>(levels.size()) - 1; }
};

/// Empty (zero) pyramid with the admissible translation ranges for [a, b].
CoefficientPyramid make_pyramid(const WaveletFamily& family, double a, double b, int top_level);

/// <f, psi^n_x> (or <f, phi^n_x>) for the piecewise-linear interpolant of a
/// scalar path, zero outside its window.
double pair_function(const SampledPath& f, const DyadicIndex& idx, const WaveletFamily& family,
                     Basis basis = Basis::Mother);

/// <W', psi^n_x> as the Riemann-Stieltjes integral of psi^n_x against the
/// piecewise-linear interpolant of W over its window.
double pair_derivative(const SampledPath& w, const DyadicIndex& idx, const WaveletFamily& family,
                       Basis basis = Basis::Mother);

/// Highest admissible truncation level for a sampling level: N <= M - 2.
int max_truncation_level(int sampling_level);

/// Pyramid of pair_function values over the path's window, levels 0..N.
CoefficientPyramid function_pyramid(const SampledPath& f, const WaveletFamily& family, int N);
/// Pyramid of pair_derivative values over the path's window, levels 0..N.
CoefficientPyramid derivative_pyramid(const SampledPath& w, const WaveletFamily& family, int N);

/// (sum_x 2^{-n} |u(x)|^p)^{1/p}
double lp_n_norm(const Eigen::Ref<const Eigen::VectorXd>& u, int n, double p);

/// Wavelet characterisation of the B^s_{p,p} norm:
///   ( ||b^0||_{l^p_0}^p + sum_n || a^n / 2^{-n/2 - n s} ||_{l^p_n}^p )^{1/p}
double besov_norm_coeffs(const CoefficientPyramid& pyramid, double s, double p);

/// Evaluates sum of coefficients times basis functions at t.
double synthesize(const CoefficientPyramid& pyramid, const WaveletFamily& family, double t);

/// CSV with header grid,phi,psi,dpsi,Psi,Phi.
void write_tabulation_csv(const WaveletFamily& family, std::ostream& out);

}  // namespace roughlift
