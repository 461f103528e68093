#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "roughlift/nilpotent_group.hpp"
#include "roughlift/path_space.hpp"
#include "roughlift/wavelet.hpp"

namespace roughlift {

/// Model built from a scalar path W on its (extended) window: the wavelet
/// coefficients of W' up to level N and the B^{alpha-1}_{p,p} norm of W'.
struct SobolevModel {
  SampledPath path;
  CoefficientPyramid derivative;
  double pi_norm = 0.0;
};

SobolevModel build_model(const SampledPath& w, const SobolevParams& params,
                         const WaveletFamily& family, int N);

/// Modelled distribution Y (scalar, on its window) with its norm.
struct ModelledDistribution {
  SampledPath path;
  double norm = 0.0;
};

/// ||Y||_{L^p} + translation seminorm
///   ( \int_{|h|<=1} \int |Y(x+h) - Y(x)|^p dx / |h|^{alpha p + 1} dh )^{1/p},
/// with x and x + h both restricted to the window of Y.
double md_norm(const SampledPath& y, const SobolevParams& params);

ModelledDistribution make_modelled_distribution(const SampledPath& y, const SobolevParams& params);

/// Mean of the piecewise-linear interpolant of a scalar path over
/// [center - radius, center + radius]; the path is zero outside its window.
double local_average(const SampledPath& y, double center, double radius);

/// Coefficients of the truncated reconstruction R_N(Y W'):
///   b_k = avg_{B(k,1)} Y <W', phi_k>,  a^n_x = avg_{B(x,2^-n)} Y <W', psi^n_x>.
CoefficientPyramid reconstruct_coeffs(const ModelledDistribution& y, const SobolevModel& model,
                                      const WaveletFamily& family, int N);

/// Z(t) - Z(s) where Z is the primitive of the synthesised pyramid.
double primitive_increment(const CoefficientPyramid& pyramid, const WaveletFamily& family,
                           double s, double t);

/// Z(t_i) - Z(a) on the level-`level` grid of [a, b], one column per pyramid.
Eigen::MatrixXd primitives_on_grid(const std::vector<const CoefficientPyramid*>& pyramids,
                                   const WaveletFamily& family, double a, double b, int level);

/// Second-level entry XX_{s,t} = Z_{s,t} - Y_s W_{s,t} on a grid of [0, 1].
class SecondLevel {
 public:
  SecondLevel(Eigen::VectorXd primitive, Eigen::VectorXd y, Eigen::VectorXd w, int level);

  int level() const { return level_; }
  Eigen::Index nodes() const { return z_.size(); }
  double operator()(Eigen::Index s, Eigen::Index t) const {
    return z_(t) - z_(s) - y_(s) * (w_(t) - w_(s));
  }
  /// Value at grid times s, t.
  double at_times(double s, double t) const;
  const Eigen::VectorXd& primitive() const { return z_; }

 private:
  Eigen::VectorXd z_;
  Eigen::VectorXd y_;
  Eigen::VectorXd w_;
  int level_;
};

/// Second level for a pair of scalar paths on [-1, 2]; the model comes from
/// W, the modelled distribution from Y. Evaluated on the level-`level` grid
/// of [0, 1] (defaults to the sampling level).
SecondLevel second_level(const SampledPath& y, const SampledPath& w, const SobolevParams& params,
                         const WaveletFamily& family, int N,
                         std::optional<int> level = std::nullopt);

/// Builds the G^2 path (X_{0,t}, XX_{0,t} + F_t) from the first level on a
/// grid of [0, 1] and row-major d x d second-level entries sharing that grid,
/// where F^{ij} = (X^i X^j - XX^{ij} - XX^{ji}) / 2 restores geometricity.
/// Throws GroupMembershipViolated if the result leaves G^2.
GroupPath assemble_lift(const SampledPath& x, const std::vector<SecondLevel>& entries);

struct LiftOptions {
  int truncation_level = 8;
  /// Grid level of the returned path; defaults to max(N, 2), capped at the
  /// sampling level. Finer grids
  /// resolve scales below 2^-N where the truncated lift is not accurate.
  std::optional<int> output_level;
};

struct Lift {
  GroupPath path;
  std::vector<SecondLevel> entries;  // row-major (i, j)
  std::vector<SobolevModel> models;  // per component
  std::vector<double> md_norms;      // per component
};

/// Rough path lift of an R^d-valued path on [0, 1]. The path is shifted to
/// start at the origin and extended to [-1, 2] componentwise.
Lift lift_path(const SampledPath& x, const SobolevParams& params, const WaveletFamily& family,
               const LiftOptions& options);

/// Inhomogeneous W^alpha_p norm of a G^2 path: ( \iint |X_{s,t}|^p / |t-s|^{alpha p + 1} )^{1/p}.
double rough_sobolev_norm(const GroupPath& path, const SobolevParams& params);

struct BoundDiagnostic {
  double lhs = 0.0;  // ( \iint_{s<t} |XX_{s,t}|^{p/2} / (t-s)^{alpha p + 1} )^{2/p}
  double rhs = 0.0;  // |W'|_{model} * |Y|_{md}
  double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

/// LHS/RHS of the reconstruction bound for the pair (Y, W) on [-1, 2],
/// with the LHS evaluated on the level-max(N, 2) grid of [0, 1].
BoundDiagnostic reconstruction_bound_diagnostic(const ModelledDistribution& y,
                                                const SobolevModel& model,
                                                const SobolevParams& params,
                                                const WaveletFamily& family, int N);

/// The integral term of the diagnostic for a given second level.
double second_level_seminorm(const SecondLevel& entry, const SobolevParams& params);

}  // namespace roughlift
