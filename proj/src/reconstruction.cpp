#include "roughlift/reconstruction.hpp"

#include <cmath>
#include <string>

#include "roughlift/error.hpp"
#include "roughlift/numeric.hpp"
#include "roughlift/quadrature.hpp"

namespace roughlift {

namespace {

void check_truncation(const SampledPath& path, int N) {
  if (N < 0 || N > max_truncation_level(path.level()))
    throw Error(ErrorCode::GridMismatch, "truncation level " + std::to_string(N) +
                                             " not in [0, " +
                                             std::to_string(max_truncation_level(path.level())) +
                                             "] for sampling level " + std::to_string(path.level()));
}

// Exact integral of the piecewise-linear interpolant from t0 to t.
class PrefixIntegral {
 public:
  explicit PrefixIntegral(const SampledPath& y) : y_(y), cumulative_(y.samples()) {
    const auto& v = y.values();
    const double h = y.spacing();
    cumulative_(0) = 0.0;
    for (Eigen::Index i = 1; i < y.samples(); ++i)
      cumulative_(i) = cumulative_(i - 1) + 0.5 * h * (v(i - 1, 0) + v(i, 0));
  }

  double operator()(double t) const {
    if (t <= y_.t0()) return 0.0;
    if (t >= y_.t1()) return cumulative_(cumulative_.size() - 1);
    const double u = std::ldexp(t - y_.t0(), y_.level());
    const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(u), y_.cells() - 1);
    const double w = u - static_cast<double>(i);
    const auto& v = y_.values();
    return cumulative_(i) + y_.spacing() * w * (v(i, 0) + 0.5 * w * (v(i + 1, 0) - v(i, 0)));
  }

  double average(double center, double radius) const {
    return ((*this)(center + radius) - (*this)(center - radius)) / (2.0 * radius);
  }

 private:
  const SampledPath& y_;
  Eigen::VectorXd cumulative_;
};

// Values of a scalar path at the level-`level` grid of [a, b].
Eigen::VectorXd sample_on_grid(const SampledPath& path, double a, double b, int level) {
  if (level > path.level())
    throw Error(ErrorCode::GridMismatch, "output grid finer than the sampling grid");
  const Eigen::Index stride = Eigen::Index{1} << (path.level() - level);
  const Eigen::Index first = path.index_of(a);
  const auto count = static_cast<Eigen::Index>(std::llround(std::ldexp(b - a, level))) + 1;
  if (first < 0 || first + (count - 1) * stride >= path.samples())
    throw Error(ErrorCode::GridMismatch, "grid window outside the path");
  Eigen::VectorXd out(count);
  for (Eigen::Index i = 0; i < count; ++i) out(i) = path.values()(first + i * stride, 0);
  return out;
}

}  // namespace

SobolevModel build_model(const SampledPath& w, const SobolevParams& params,
                         const WaveletFamily& family, int N) {
  check_truncation(w, N);
  SobolevModel model{w, derivative_pyramid(w, family, N), 0.0};
  model.pi_norm = besov_norm_coeffs(model.derivative, params.alpha - 1.0, params.p);
  return model;
}

double md_norm(const SampledPath& y, const SobolevParams& params) {
  if (y.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "modelled distribution must be scalar");
  const double p = params.p;
  const double h = y.spacing();
  const Eigen::VectorXd v = y.values().col(0);
  const Eigen::Index n = v.size();

  double lp = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    lp += w * power(std::abs(v(i)), p);
  }

  const Eigen::Index unit = Eigen::Index{1} << y.level();
  const Eigen::Index max_shift = std::min(unit, n - 1);
  const double exponent = params.alpha * p + 1.0;
  double translation = 0.0;
  for (Eigen::Index m = 1; m <= max_shift; ++m) {
    double inner = 0.0;
    for (Eigen::Index i = 0; i + m < n; ++i) inner += power(std::abs(v(i + m) - v(i)), p);
    const double shift = static_cast<double>(m) * h;
    const double dh = (m == unit) ? 0.5 * h : h;
    // both signs of the shift contribute equally
    translation += 2.0 * dh * h * inner / std::pow(shift, exponent);
  }
  return std::pow(lp, 1.0 / p) + std::pow(translation, 1.0 / p);
}

ModelledDistribution make_modelled_distribution(const SampledPath& y, const SobolevParams& params) {
  return ModelledDistribution{y, md_norm(y, params)};
}

double local_average(const SampledPath& y, double center, double radius) {
  return PrefixIntegral(y).average(center, radius);
}

CoefficientPyramid reconstruct_coeffs(const ModelledDistribution& y, const SobolevModel& model,
                                      const WaveletFamily& /*family*/, int N) {
  if (N > model.derivative.top_level())
    throw Error(ErrorCode::GridMismatch, "truncation level exceeds the model's levels");
  const PrefixIntegral integral(y.path);
  CoefficientPyramid out = model.derivative;
  out.levels.resize(static_cast<std::size_t>(N) + 1);
  for (Eigen::Index i = 0; i < out.base.coeffs.size(); ++i)
    out.base.coeffs(i) *= integral.average(static_cast<double>(out.base.k_min + i), 1.0);
  for (int n = 0; n <= N; ++n) {
    auto& level = out.levels[static_cast<std::size_t>(n)];
    const double radius = std::ldexp(1.0, -n);
    for (Eigen::Index i = 0; i < level.coeffs.size(); ++i)
      level.coeffs(i) *= integral.average(std::ldexp(static_cast<double>(level.k_min + i), -n), radius);
  }
  return out;
}

double primitive_increment(const CoefficientPyramid& pyramid, const WaveletFamily& family,
                           double s, double t) {
  auto level_sum = [&](const CoefficientLevel& level, int n, Basis basis) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < level.coeffs.size(); ++i) {
      const double k = static_cast<double>(level.k_min + i);
      acc += level.coeffs(i) * (family.eval(basis, Order::Primitive, std::ldexp(t, n) - k) -
                                family.eval(basis, Order::Primitive, std::ldexp(s, n) - k));
    }
    return std::pow(2.0, -0.5 * n) * acc;
  };
  double total = level_sum(pyramid.base, 0, Basis::Father);
  for (int n = 0; n <= pyramid.top_level(); ++n)
    total += level_sum(pyramid.levels[static_cast<std::size_t>(n)], n, Basis::Mother);
  return total;
}

Eigen::MatrixXd primitives_on_grid(const std::vector<const CoefficientPyramid*>& pyramids,
                                   const WaveletFamily& family, double a, double b, int level) {
  const auto count = static_cast<Eigen::Index>(pyramids.size());
  const auto nodes = static_cast<Eigen::Index>(std::llround(std::ldexp(b - a, level))) + 1;
  const double h = std::ldexp(1.0, -level);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(nodes, count);
  // tail(i, c) is added to every node >= i: the constant primitive value
  // right of each support.
  Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(nodes + 1, count);
  Eigen::VectorXd coeff(count);

  auto accumulate = [&](int n, Basis basis, auto&& coefficient_at, std::int64_t k_min, std::int64_t k_max) {
    const double scale = std::pow(2.0, -0.5 * n);
    const double end_value = scale * family.eval(basis, Order::Primitive, family.support_hi());
    for (auto k = k_min; k <= k_max; ++k) {
      bool any = false;
      for (Eigen::Index c = 0; c < count; ++c) {
        coeff(c) = coefficient_at(c, k);
        any = any || coeff(c) != 0.0;
      }
      if (!any) continue;
      const double x = std::ldexp(static_cast<double>(k), -n);
      const double lo = x + std::ldexp(family.support_lo(), -n);
      const double hi = x + std::ldexp(family.support_hi(), -n);
      const auto first = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil((lo - a) / h)));
      const auto last = std::min<Eigen::Index>(nodes - 1, static_cast<Eigen::Index>(std::floor((hi - a) / h)));
      for (Eigen::Index i = first; i <= last; ++i) {
        const double value = scale * family.eval(basis, Order::Primitive, std::ldexp(a + static_cast<double>(i) * h - x, n));
        z.row(i) += value * coeff.transpose();
      }
      const Eigen::Index tail_start = std::max<Eigen::Index>(last + 1, 0);
      if (tail_start < nodes) tail.row(tail_start) += end_value * coeff.transpose();
    }
  };

  const auto& first_pyr = *pyramids.front();
  accumulate(0, Basis::Father,
             [&](Eigen::Index c, std::int64_t k) { return pyramids[static_cast<std::size_t>(c)]->base.at(k); },
             first_pyr.base.k_min, first_pyr.base.k_max());
  for (int n = 0; n <= first_pyr.top_level(); ++n) {
    const auto ln = static_cast<std::size_t>(n);
    accumulate(n, Basis::Mother,
               [&](Eigen::Index c, std::int64_t k) { return pyramids[static_cast<std::size_t>(c)]->levels[ln].at(k); },
               first_pyr.levels[ln].k_min, first_pyr.levels[ln].k_max());
  }

  Eigen::RowVectorXd running = Eigen::RowVectorXd::Zero(count);
  for (Eigen::Index i = 0; i < nodes; ++i) {
    running += tail.row(i);
    z.row(i) += running;
  }
  z.rowwise() -= z.row(0).eval();
  return z;
}

SecondLevel::SecondLevel(Eigen::VectorXd primitive, Eigen::VectorXd y, Eigen::VectorXd w, int level)
    : z_(std::move(primitive)), y_(std::move(y)), w_(std::move(w)), level_(level) {
  if (z_.size() != y_.size() || z_.size() != w_.size())
    throw Error(ErrorCode::GridMismatch, "second level inputs differ in length");
}

double SecondLevel::at_times(double s, double t) const {
  const auto is = static_cast<Eigen::Index>(std::llround(std::ldexp(s, level_)));
  const auto it = static_cast<Eigen::Index>(std::llround(std::ldexp(t, level_)));
  return (*this)(is, it);
}

SecondLevel second_level(const SampledPath& y, const SampledPath& w, const SobolevParams& params,
                         const WaveletFamily& family, int N, std::optional<int> level) {
  const int out_level = level.value_or(w.level());
  const SobolevModel model = build_model(w, params, family, N);
  const ModelledDistribution md{y, 0.0};
  const CoefficientPyramid pyr = reconstruct_coeffs(md, model, family, N);
  Eigen::MatrixXd z = primitives_on_grid({&pyr}, family, 0.0, 1.0, out_level);
  return SecondLevel(z.col(0), sample_on_grid(y, 0.0, 1.0, out_level),
                     sample_on_grid(w, 0.0, 1.0, out_level), out_level);
}

GroupPath assemble_lift(const SampledPath& x, const std::vector<SecondLevel>& entries) {
  const Eigen::Index d = x.dim();
  if (static_cast<Eigen::Index>(entries.size()) != d * d)
    throw Error(ErrorCode::DimensionMismatch, "need d*d second-level entries");
  const Eigen::Index n = x.samples();
  for (const auto& e : entries)
    if (e.nodes() != n) throw Error(ErrorCode::GridMismatch, "second level grid differs from the path grid");

  Eigen::MatrixXd l1 = x.values().rowwise() - x.values().row(0);
  Eigen::MatrixXd l2(n, d * d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto& xij = entries[static_cast<std::size_t>(i * d + j)];
      const auto& xji = entries[static_cast<std::size_t>(j * d + i)];
      for (Eigen::Index t = 0; t < n; ++t)
        l2(t, j * d + i) = 0.5 * l1(t, i) * l1(t, j) + 0.5 * (xij(0, t) - xji(0, t));
    }
  GroupPath path(std::move(l1), std::move(l2), x.t0(), x.t1(), x.level());

  const double tol = 1e-10 * std::max(path.scale(), 1e-300);
  for (Eigen::Index t = 0; t < n; ++t)
    if (membership_defect(path.element(t)) > tol)
      throw Error(ErrorCode::GroupMembershipViolated,
                  "assembled lift leaves G^2 at node " + std::to_string(t));
  return path;
}

Lift lift_path(const SampledPath& x, const SobolevParams& params, const WaveletFamily& family,
               const LiftOptions& options) {
  if (x.t0() != 0.0 || x.t1() != 1.0)
    throw Error(ErrorCode::GridMismatch, "lift expects a path on [0, 1]");
  const int N = options.truncation_level;
  check_truncation(x, N);
  const int out_level = options.output_level.value_or(std::min(std::max(N, 2), x.level()));
  if (out_level < 2 || out_level > x.level())
    throw Error(ErrorCode::GridMismatch, "output level must lie in [2, sampling level]");

  const Eigen::Index d = x.dim();
  const SampledPath centred(x.values().rowwise() - x.values().row(0), 0.0, 1.0, x.level());

  Lift lift;
  std::vector<SampledPath> extended;
  for (Eigen::Index c = 0; c < d; ++c) {
    extended.push_back(extend_path(centred.component(c)));
    lift.models.push_back(build_model(extended.back(), params, family, N));
    lift.md_norms.push_back(md_norm(extended.back(), params));
  }

  std::vector<CoefficientPyramid> pyramids;
  pyramids.reserve(static_cast<std::size_t>(d * d));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const ModelledDistribution md{extended[static_cast<std::size_t>(i)], 0.0};
      pyramids.push_back(reconstruct_coeffs(md, lift.models[static_cast<std::size_t>(j)], family, N));
    }
  std::vector<const CoefficientPyramid*> refs;
  for (const auto& p : pyramids) refs.push_back(&p);
  const Eigen::MatrixXd z = primitives_on_grid(refs, family, 0.0, 1.0, out_level);

  std::vector<Eigen::VectorXd> sampled;
  for (Eigen::Index c = 0; c < d; ++c)
    sampled.push_back(sample_on_grid(extended[static_cast<std::size_t>(c)], 0.0, 1.0, out_level));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      lift.entries.emplace_back(z.col(i * d + j), sampled[static_cast<std::size_t>(i)],
                                sampled[static_cast<std::size_t>(j)], out_level);

  Eigen::MatrixXd coarse(sampled.front().size(), d);
  for (Eigen::Index c = 0; c < d; ++c) coarse.col(c) = sampled[static_cast<std::size_t>(c)];
  lift.path = assemble_lift(SampledPath(std::move(coarse), 0.0, 1.0, out_level), lift.entries);
  return lift;
}

double rough_sobolev_norm(const GroupPath& path, const SobolevParams& params) {
  const KernelQuadrature quad(path.nodes(), path.spacing(), params.alpha * params.p + 1.0);
  const double p = params.p;
  const double total = quad.symmetric(
      [&](Eigen::Index s, Eigen::Index t) { return power(path.increment_norm(s, t), p); });
  return std::pow(total, 1.0 / p);
}

double second_level_seminorm(const SecondLevel& entry, const SobolevParams& params) {
  const double h = std::ldexp(1.0, -entry.level());
  const KernelQuadrature quad(entry.nodes(), h, params.alpha * params.p + 1.0);
  const double half_p = 0.5 * params.p;
  const double total =
      quad.upper([&](Eigen::Index s, Eigen::Index t) { return power(std::abs(entry(s, t)), half_p); });
  return std::pow(total, 1.0 / half_p);
}

BoundDiagnostic reconstruction_bound_diagnostic(const ModelledDistribution& y,
                                                const SobolevModel& model,
                                                const SobolevParams& params,
                                                const WaveletFamily& family, int N) {
  const CoefficientPyramid pyr = reconstruct_coeffs(y, model, family, N);
  const int level = std::min(std::max(N, 2), model.path.level());
  const Eigen::MatrixXd z = primitives_on_grid({&pyr}, family, 0.0, 1.0, level);
  const SecondLevel entry(z.col(0), sample_on_grid(y.path, 0.0, 1.0, level),
                          sample_on_grid(model.path, 0.0, 1.0, level), level);
  return BoundDiagnostic{second_level_seminorm(entry, params), model.pi_norm * y.norm};
}

}  // namespace roughlift
