#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "roughlift/error.hpp"
#include "roughlift/path_space.hpp"

namespace roughlift {

/// Element (level1, level2) of the step-2 truncated tensor algebra over R^d.
template <typename Scalar>
struct GroupElement {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector level1;
  Matrix level2;

  static GroupElement identity(Eigen::Index d) {
    return GroupElement{Vector::Zero(d), Matrix::Zero(d, d)};
  }
  Eigen::Index dim() const { return level1.size(); }
};

using GroupElementd = GroupElement<double>;

/// (g1 + h1, g2 + h2 + g1 (x) h1)
template <typename Scalar>
GroupElement<Scalar> tensor_mul(const GroupElement<Scalar>& g, const GroupElement<Scalar>& h) {
  if (g.dim() != h.dim()) throw Error(ErrorCode::DimensionMismatch, "tensor_mul operands differ in dimension");
  return GroupElement<Scalar>{g.level1 + h.level1,
                              g.level2 + h.level2 + g.level1 * h.level1.transpose()};
}

/// (-g1, -g2 + g1 (x) g1)
template <typename Scalar>
GroupElement<Scalar> inverse(const GroupElement<Scalar>& g) {
  return GroupElement<Scalar>{-g.level1, -g.level2 + g.level1 * g.level1.transpose()};
}

/// X_s^{-1} (x) X_t
template <typename Scalar>
GroupElement<Scalar> increment(const GroupElement<Scalar>& xs, const GroupElement<Scalar>& xt) {
  return tensor_mul(inverse(xs), xt);
}

/// Dilation delta_lambda: (lambda g1, lambda^2 g2).
template <typename Scalar>
GroupElement<Scalar> dilate(const GroupElement<Scalar>& g, Scalar lambda) {
  return GroupElement<Scalar>{lambda * g.level1, lambda * lambda * g.level2};
}

/// max |Sym(g2) - g1 (x) g1 / 2|; zero exactly on G^2(R^d).
template <typename Scalar>
Scalar membership_defect(const GroupElement<Scalar>& g) {
  const typename GroupElement<Scalar>::Matrix sym =
      Scalar(0.5) * (g.level2 + g.level2.transpose()) - Scalar(0.5) * g.level1 * g.level1.transpose();
  return sym.cwiseAbs().maxCoeff();
}

/// Size against which membership defects are measured: max(|g1|^2, max |g2|).
template <typename Scalar>
Scalar element_scale(const GroupElement<Scalar>& g) {
  return std::max(g.level1.squaredNorm(), g.level2.cwiseAbs().maxCoeff());
}

template <typename Scalar>
bool in_group(const GroupElement<Scalar>& g, Scalar rel_tol) {
  return membership_defect(g) <= rel_tol * element_scale(g);
}

/// |g1| + sqrt(2 |Anti(g2)|_F), no membership check.
template <typename Scalar>
Scalar homogeneous_norm_unchecked(const GroupElement<Scalar>& g) {
  const typename GroupElement<Scalar>::Matrix anti = Scalar(0.5) * (g.level2 - g.level2.transpose());
  using std::sqrt;
  return g.level1.norm() + sqrt(Scalar(2) * anti.norm());
}

/// Homogeneous norm; throws NotInGroup if the element is off G^2 by more
/// than rel_tol relative to its scale.
template <typename Scalar>
Scalar homogeneous_norm(const GroupElement<Scalar>& g, Scalar rel_tol = Scalar(1e-8)) {
  if (!in_group(g, rel_tol))
    throw Error(ErrorCode::NotInGroup,
                "symmetric part of level 2 differs from level1 (x) level1 / 2 by " +
                    std::to_string(static_cast<double>(membership_defect(g))));
  return homogeneous_norm_unchecked(g);
}

/// G^2-valued path on a dyadic grid of [t0, t1]. Row i of level1 is X_{t_i}
/// in R^d; row i of level2 is the d x d second level, column-major.
class GroupPath {
 public:
  GroupPath() = default;
  GroupPath(Eigen::MatrixXd level1, Eigen::MatrixXd level2, double t0, double t1, int level)
      : level1_(std::move(level1)), level2_(std::move(level2)), t0_(t0), t1_(t1), level_(level) {
    const Eigen::Index d = level1_.cols();
    const double expected = (t1 - t0) * std::ldexp(1.0, level) + 1.0;
    if (level2_.cols() != d * d || level2_.rows() != level1_.rows())
      throw Error(ErrorCode::DimensionMismatch, "level2 must hold d*d entries per node");
    if (static_cast<double>(level1_.rows()) != expected)
      throw Error(ErrorCode::GridMismatch, "group path does not fill a dyadic grid");
  }

  Eigen::Index nodes() const { return level1_.rows(); }
  Eigen::Index dim() const { return level1_.cols(); }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  int level() const { return level_; }
  double spacing() const { return std::ldexp(1.0, -level_); }
  double time(Eigen::Index i) const { return t0_ + static_cast<double>(i) * spacing(); }
  Eigen::Index index_of(double t) const {
    return static_cast<Eigen::Index>(std::llround(std::ldexp(t - t0_, level_)));
  }

  const Eigen::MatrixXd& level1() const { return level1_; }
  const Eigen::MatrixXd& level2() const { return level2_; }
  Eigen::MatrixXd& level2() { return level2_; }

  double level2_at(Eigen::Index node, Eigen::Index i, Eigen::Index j) const {
    return level2_(node, j * dim() + i);
  }

  GroupElementd element(Eigen::Index node) const {
    const Eigen::Index d = dim();
    GroupElementd g{level1_.row(node).transpose(), Eigen::MatrixXd(d, d)};
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) g.level2(i, j) = level2_at(node, i, j);
    return g;
  }

  /// X_{s,t} = X_s^{-1} (x) X_t for grid indices s, t.
  GroupElementd increment(Eigen::Index s, Eigen::Index t) const {
    return roughlift::increment(element(s), element(t));
  }

  /// Level-2 entry (i,j) of X_{s,t} without forming the element.
  double increment_level2(Eigen::Index s, Eigen::Index t, Eigen::Index i, Eigen::Index j) const {
    return level2_at(t, i, j) - level2_at(s, i, j) - level1_(s, i) * (level1_(t, j) - level1_(s, j));
  }

  /// Homogeneous norm of X_{s,t}, computed entrywise.
  double increment_norm(Eigen::Index s, Eigen::Index t) const {
    const Eigen::Index d = dim();
    double l1 = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double di = level1_(t, i) - level1_(s, i);
      l1 += di * di;
    }
    double anti = 0.0;  // sum over i < j of Anti_{ij}^2; |Anti|_F^2 is twice this
    for (Eigen::Index j = 1; j < d; ++j)
      for (Eigen::Index i = 0; i < j; ++i) {
        const double a = 0.5 * (increment_level2(s, t, i, j) - increment_level2(s, t, j, i));
        anti += a * a;
      }
    return std::sqrt(l1) + std::sqrt(2.0 * std::sqrt(2.0 * anti));
  }

  /// Largest of |X_t|^2 and max |level2| over all nodes.
  double scale() const {
    return std::max(level1_.rowwise().squaredNorm().maxCoeff(), level2_.cwiseAbs().maxCoeff());
  }

 private:
  Eigen::MatrixXd level1_;
  Eigen::MatrixXd level2_;
  double t0_ = 0.0;
  double t1_ = 1.0;
  int level_ = 0;
};

/// Canonical lift of the piecewise-linear interpolant: each segment carries
/// (delta, delta (x) delta / 2), composed by Chen's relation from the identity.
inline GroupPath signature2_pl(const SampledPath& x) {
  const Eigen::Index n = x.samples();
  const Eigen::Index d = x.dim();
  Eigen::MatrixXd l1(n, d);
  Eigen::MatrixXd l2(n, d * d);
  GroupElementd acc = GroupElementd::identity(d);
  for (Eigen::Index s = 0; s < n; ++s) {
    if (s > 0) {
      const Eigen::VectorXd delta = (x.values().row(s) - x.values().row(s - 1)).transpose();
      acc = tensor_mul(acc, GroupElementd{delta, 0.5 * delta * delta.transpose()});
    }
    l1.row(s) = acc.level1.transpose();
    l2.row(s) = Eigen::Map<const Eigen::RowVectorXd>(acc.level2.data(), d * d);
  }
  return GroupPath(std::move(l1), std::move(l2), x.t0(), x.t1(), x.level());
}

}  // namespace roughlift
