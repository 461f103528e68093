#include "roughlift/path_space.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "roughlift/error.hpp"
#include "roughlift/numeric.hpp"
#include "roughlift/quadrature.hpp"
#include "roughlift/wavelet.hpp"

namespace roughlift {

SobolevParams validate_params(double alpha, double p) {
  if (!(alpha > 1.0 / 3.0 && alpha < 0.5))
    throw Error(ErrorCode::AlphaOutOfRange, "alpha = " + std::to_string(alpha) + " not in (1/3, 1/2)");
  if (std::isinf(p)) throw Error(ErrorCode::InfiniteP, "p = infinity is not supported");
  if (!(p > 1.0 / alpha))
    throw Error(ErrorCode::IntegrabilityTooLow,
                "p = " + std::to_string(p) + " must exceed 1/alpha = " + std::to_string(1.0 / alpha));
  return SobolevParams{alpha, p, 2.0 * alpha - 1.0};
}

SampledPath::SampledPath(Eigen::MatrixXd values, double t0, double t1, int level)
    : values_(std::move(values)), t0_(t0), t1_(t1), level_(level) {
  const double expected = (t1 - t0) * std::ldexp(1.0, level) + 1.0;
  if (!(t1 > t0) || static_cast<double>(values_.rows()) != expected)
    throw Error(ErrorCode::GridMismatch, "path with " + std::to_string(values_.rows()) +
                                             " samples does not match a dyadic grid of level " +
                                             std::to_string(level) + " on [" + std::to_string(t0) +
                                             ", " + std::to_string(t1) + "]");
  if (!values_.allFinite()) throw Error(ErrorCode::DegenerateGrid, "path contains non-finite values");
}

Eigen::Index SampledPath::index_of(double t) const {
  return static_cast<Eigen::Index>(std::llround(std::ldexp(t - t0_, level_)));
}

SampledPath SampledPath::component(Eigen::Index c) const {
  return SampledPath(values_.col(c), t0_, t1_, level_);
}

Eigen::VectorXd SampledPath::interpolate(double t) const {
  if (t < t0_ || t > t1_) return Eigen::VectorXd::Zero(dim());
  const double u = std::ldexp(t - t0_, level_);
  const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(u), cells() - 1);
  const double w = u - static_cast<double>(i);
  return ((1.0 - w) * values_.row(i) + w * values_.row(i + 1)).transpose();
}

SampledPath SampledPath::restrict(double a, double b) const {
  const Eigen::Index first = index_of(a);
  const Eigen::Index last = index_of(b);
  if (first < 0 || last >= samples() || last <= first)
    throw Error(ErrorCode::GridMismatch, "restriction window outside the path");
  return SampledPath(values_.middleRows(first, last - first + 1), a, b, level_);
}

SobolevNorm sobolev_norm_path(const SampledPath& f, const SobolevParams& params,
                              const std::optional<Eigen::VectorXd>& x0) {
  if (f.samples() < 4) throw Error(ErrorCode::DegenerateGrid, "need at least 4 samples");
  const Eigen::VectorXd ref = x0.value_or(Eigen::VectorXd(f.values().row(0).transpose()));
  if (ref.size() != f.dim()) throw Error(ErrorCode::DimensionMismatch, "reference point dimension");

  const double p = params.p;
  const KernelQuadrature quad(f.samples(), f.spacing(), params.alpha * p + 1.0);
  const Eigen::MatrixXd v = f.values().transpose();  // column per sample
  const double half_p = 0.5 * p;

  const double seminorm_p = quad.symmetric([&](Eigen::Index i, Eigen::Index j) {
    return power(( v.col(j) - v.col(i)).squaredNorm(), half_p);
  });
  double lp = 0.0;
  for (Eigen::Index i = 0; i < f.samples(); ++i)
    lp += quad.weight(i) * power((v.col(i) - ref).squaredNorm(), half_p);

  return SobolevNorm{std::pow(seminorm_p, 1.0 / p), std::pow(lp, 1.0 / p)};
}

double extension_cutoff(double t) {
  // C^3 smoothstep 35u^4 - 84u^5 + 70u^6 - 20u^7
  auto smoothstep = [](double u) {
    const double u4 = u * u * u * u;
    return u4 * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
  };
  if (t <= -1.0 || t >= 2.0) return 0.0;
  if (t < 0.0) return smoothstep(t + 1.0);
  if (t > 1.0) return smoothstep(2.0 - t);
  return 1.0;
}

SampledPath extend_path(const SampledPath& f) {
  if (f.t0() != 0.0 || f.t1() != 1.0)
    throw Error(ErrorCode::GridMismatch, "extension expects a path on [0, 1]");
  const Eigen::Index unit = f.cells();
  Eigen::MatrixXd out(3 * unit + 1, f.dim());
  out.middleRows(unit, unit + 1) = f.values();
  const double h = f.spacing();
  for (Eigen::Index i = 1; i <= unit; ++i) {
    // t = -i h reflects to i h; t = 1 + i h reflects to 1 - i h
    const double t_left = -static_cast<double>(i) * h;
    out.row(unit - i) = extension_cutoff(t_left) * f.values().row(i);
    out.row(2 * unit + i) = extension_cutoff(1.0 + static_cast<double>(i) * h) * f.values().row(unit - i);
  }
  return SampledPath(std::move(out), -1.0, 2.0, f.level());
}

SampledPath wavelet_series_path(double smoothness, double log_decay, std::uint64_t seed, int level,
                                Eigen::Index d, const WaveletFamily& family) {
  if (level > kMaxGridLevel)
    throw Error(ErrorCode::ResourceLimit,
                "grid level " + std::to_string(level) + " exceeds " + std::to_string(kMaxGridLevel));
  if (level < 2) throw Error(ErrorCode::DegenerateGrid, "grid level must be at least 2");

  const Eigen::Index samples = (Eigen::Index{1} << level) + 1;
  const double h = std::ldexp(1.0, -level);
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(samples, d);
  const int top = max_truncation_level(level);

  for (Eigen::Index c = 0; c < d; ++c) {
    for (int n = 0; n <= top; ++n) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(n)};
      std::mt19937_64 rng(seq);
      const double magnitude = std::pow(2.0, -n * (smoothness + 0.5)) *
                               std::pow(static_cast<double>(std::max(n, 1)), -log_decay) *
                               std::pow(2.0, 0.5 * n);
      const auto [k_min, k_max] = translation_range(family, n, 0.0, 1.0);
      for (auto k = k_min; k <= k_max; ++k) {
        const double coeff = (rng() & 1U) ? magnitude : -magnitude;
        const double lo = std::ldexp(static_cast<double>(k) + family.support_lo(), -n);
        const double hi = std::ldexp(static_cast<double>(k) + family.support_hi(), -n);
        const auto first = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(lo / h)));
        const auto last = std::min<Eigen::Index>(samples - 1, static_cast<Eigen::Index>(std::floor(hi / h)));
        for (Eigen::Index i = first; i <= last; ++i)
          values(i, c) += coeff * family.eval(Basis::Mother, Order::Value,
                                              std::ldexp(static_cast<double>(i) * h, n) - static_cast<double>(k));
      }
    }
  }
  values.rowwise() -= values.row(0).eval();
  return SampledPath(std::move(values), 0.0, 1.0, level);
}

SampledPath generate_sobolev_path(const SobolevParams& params, std::uint64_t seed, int level,
                                  Eigen::Index d, const WaveletFamily& family) {
  return wavelet_series_path(params.alpha, 2.0 / params.p, seed, level, d, family);
}

SampledPath generate_sobolev_path(const SobolevParams& params, std::uint64_t seed, int level,
                                  Eigen::Index d) {
  if (level > kMaxGridLevel)
    throw Error(ErrorCode::ResourceLimit,
                "grid level " + std::to_string(level) + " exceeds " + std::to_string(kMaxGridLevel));
  return generate_sobolev_path(params, seed, level, d, default_family());
}

}  // namespace roughlift
