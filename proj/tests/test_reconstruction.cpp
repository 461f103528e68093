#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "roughlift/metrics.hpp"
#include "roughlift/reconstruction.hpp"

using namespace roughlift;
using roughlift::testing::error_of;
using roughlift::testing::Gen;
using roughlift::testing::sample;

namespace {

const SobolevParams kParams{0.4, 4.0, -0.2};

const WaveletFamily& fam() { return default_family(); }

SampledPath constant_wide(double c, int level) {
  return sample([&](double, Eigen::Index) { return c; }, -9.0, 10.0, level);
}

SampledPath seeded(std::uint64_t seed, int level, const SobolevParams& params = kParams) {
  return extend_path(generate_sobolev_path(params, seed, level, 1));
}

SampledPath smooth(double (*f)(double), int level) {
  return extend_path(sample([&](double t, Eigen::Index) { return f(t); }, 0.0, 1.0, level));
}

double sin2pi(double t) { return std::sin(2.0 * std::numbers::pi * t); }
double cos2pi(double t) { return std::cos(2.0 * std::numbers::pi * t) - 1.0; }

bool support_inside(const DyadicIndex& idx, double a, double b) {
  return std::ldexp(static_cast<double>(idx.k) + fam().support_lo(), -idx.n) >= a &&
         std::ldexp(static_cast<double>(idx.k) + fam().support_hi(), -idx.n) <= b;
}

double max_abs(const CoefficientPyramid& p) {
  double m = p.base.coeffs.cwiseAbs().maxCoeff();
  for (const auto& l : p.levels) m = std::max(m, l.coeffs.cwiseAbs().maxCoeff());
  return m;
}

double max_diff(const CoefficientPyramid& a, const CoefficientPyramid& b) {
  REQUIRE(a.levels.size() == b.levels.size());
  double m = (a.base.coeffs - b.base.coeffs).cwiseAbs().maxCoeff();
  for (std::size_t n = 0; n < a.levels.size(); ++n)
    m = std::max(m, (a.levels[n].coeffs - b.levels[n].coeffs).cwiseAbs().maxCoeff());
  return m;
}

SampledPath combine(double a, const SampledPath& u, double b, const SampledPath& v) {
  return SampledPath(a * u.values() + b * v.values(), u.t0(), u.t1(), u.level());
}

}  // namespace

TEST_CASE("build_model: zero and linear paths") {
  const SampledPath zero(Eigen::MatrixXd::Zero((3 << 9) + 1, 1), -1.0, 2.0, 9);
  CHECK(build_model(zero, kParams, fam(), 6).pi_norm == 0.0);

  const SampledPath line = sample([](double t, Eigen::Index) { return 2.0 * t + 1.0; }, -1.0, 2.0, 10);
  const SobolevModel model = build_model(line, kParams, fam(), 8);
  int interior = 0;
  for (int n = 0; n <= 8; ++n) {
    const CoefficientLevel& level = model.derivative.levels[static_cast<std::size_t>(n)];
    for (auto k = level.k_min; k <= level.k_max(); ++k) {
      if (!support_inside({n, k}, -1.0, 2.0)) continue;
      CHECK(std::abs(level.at(k)) < 1e-10);
      ++interior;
    }
  }
  CHECK(interior > 500);
  CHECK(model.pi_norm == doctest::Approx(besov_norm_coeffs(model.derivative, kParams.alpha - 1.0, kParams.p)));
  CHECK(error_of([&] { build_model(line, kParams, fam(), 9); }) == ErrorCode::GridMismatch);
}

TEST_CASE("build_model: pi_norm stable under N -> N+2") {
  for (const std::uint64_t seed : {1, 2, 3}) {
    const SampledPath w = seeded(seed, 13);
    const double a = build_model(w, kParams, fam(), 8).pi_norm;
    const double b = build_model(w, kParams, fam(), 10).pi_norm;
    CHECK(std::isfinite(a));
    CHECK(std::abs(a - b) / b < 0.02);
  }
}

TEST_CASE("md_norm: constants, homogeneity and equivalence with the path norm") {
  const double c = -1.3;
  const SampledPath y(Eigen::MatrixXd::Constant((3 << 8) + 1, 1, c), -1.0, 2.0, 8);
  CHECK(md_norm(y, kParams) == doctest::Approx(std::abs(c) * std::pow(3.0, 1.0 / kParams.p)).epsilon(1e-12));

  Gen gen(2);
  for (const std::uint64_t seed : {4, 5, 6}) {
    const SampledPath w = seeded(seed, 10);
    const double base = md_norm(w, kParams);
    const double lambda = gen.uniform(-5.0, 5.0);
    CHECK(md_norm(combine(lambda, w, 0.0, w), kParams) == doctest::Approx(std::abs(lambda) * base).epsilon(1e-12));
    const double ratio = base / sobolev_norm_path(w, kParams, Eigen::VectorXd::Zero(1)).total();
    CHECK(ratio > 0.25);
    CHECK(ratio < 4.0);
  }
  CHECK(error_of([] { md_norm(SampledPath(Eigen::MatrixXd::Zero(5, 2), 0.0, 1.0, 2), kParams); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("local_average: linear data and the zero extension") {
  const SampledPath y = sample([](double t, Eigen::Index) { return 3.0 * t - 1.0; }, -1.0, 2.0, 9);
  CHECK(local_average(y, 0.3, 0.25) == doctest::Approx(3.0 * 0.3 - 1.0));
  CHECK(local_average(y, 0.5, 1.5) == doctest::Approx(3.0 * 0.5 - 1.0));
  // [1.5, 2.5]: half inside the window, mean of the inside half over the full ball
  CHECK(local_average(y, 2.0, 0.5) == doctest::Approx(0.5 * (3.0 * 1.75 - 1.0)));
  CHECK(local_average(y, 5.0, 0.5) == 0.0);
}

TEST_CASE("reconstruct_coeffs: Y = 1 gives the model, Y = 0 gives zero") {
  const SampledPath w = seeded(7, 10);
  const SobolevModel model = build_model(w, kParams, fam(), 8);
  const CoefficientPyramid one = reconstruct_coeffs(make_modelled_distribution(constant_wide(1.0, 10), kParams), model, fam(), 8);
  CHECK(max_diff(one, model.derivative) <= 1e-14 * max_abs(model.derivative));
  const CoefficientPyramid zero = reconstruct_coeffs(make_modelled_distribution(constant_wide(0.0, 10), kParams), model, fam(), 8);
  CHECK(max_abs(zero) == 0.0);
}

TEST_CASE("reconstruct_coeffs: polynomial W leaves only boundary and father entries") {
  const SampledPath w = sample([](double t, Eigen::Index) { return t * t - 0.5 * t; }, -1.0, 2.0, 12);
  const SobolevModel model = build_model(w, kParams, fam(), 8);
  const CoefficientPyramid pyr = reconstruct_coeffs(make_modelled_distribution(seeded(3, 12), kParams), model, fam(), 8);
  for (int n = 0; n <= 8; ++n) {
    const CoefficientLevel& level = pyr.levels[static_cast<std::size_t>(n)];
    for (auto k = level.k_min; k <= level.k_max(); ++k)
      if (support_inside({n, k}, -1.0, 2.0)) CHECK(std::abs(level.at(k)) < 1e-7);
  }
  CHECK(pyr.base.coeffs.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("primitive_increment: zero length, additivity, reconstruction of W") {
  // smooth across the reflection points, so the oracle is limited only by sampling
  const SampledPath w = smooth(cos2pi, 12);
  const SobolevModel model = build_model(w, kParams, fam(), 10);
  const CoefficientPyramid pyr = reconstruct_coeffs(make_modelled_distribution(constant_wide(1.0, 12), kParams), model, fam(), 10);
  CHECK(primitive_increment(pyr, fam(), 0.3, 0.3) == 0.0);

  Gen gen(9);
  const double sup_w = w.values().cwiseAbs().maxCoeff();
  for (int trial = 0; trial < 40; ++trial) {
    double s = gen.uniform(0.0, 1.0);
    double u = gen.uniform(0.0, 1.0);
    if (s > u) std::swap(s, u);
    const double t = gen.uniform(s, u);
    const double whole = primitive_increment(pyr, fam(), s, u);
    const double parts = primitive_increment(pyr, fam(), s, t) + primitive_increment(pyr, fam(), t, u);
    CHECK(std::abs(whole - parts) < 1e-12);

    const Eigen::Index i = w.index_of(s);
    const Eigen::Index j = w.index_of(u);
    const double z = primitive_increment(pyr, fam(), w.time(i), w.time(j));
    CHECK(std::abs(z - (w.values()(j, 0) - w.values()(i, 0))) < 1e-5 * sup_w);
  }

  const Eigen::MatrixXd grid = primitives_on_grid({&pyr}, fam(), 0.0, 1.0, 6);
  for (Eigen::Index i = 0; i < grid.rows(); i += 7)
    CHECK(grid(i, 0) == doctest::Approx(primitive_increment(pyr, fam(), 0.0, std::ldexp(static_cast<double>(i), -6))).epsilon(1e-10).scale(1.0));
}

TEST_CASE("second_level: constant Y is annihilated up to truncation") {
  const SampledPath w = smooth(cos2pi, 12);
  const SecondLevel xx = second_level(constant_wide(2.5, 12), w, kParams, fam(), 10, 8);
  const double scale = 2.5 * w.values().cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index s = 0; s < xx.nodes(); ++s)
    for (Eigen::Index t = s; t < xx.nodes(); ++t) worst = std::max(worst, std::abs(xx(s, t)));
  CHECK(worst < 1e-5 * scale);
}

TEST_CASE("second_level: Chen defect and bilinearity") {
  const SampledPath y1 = seeded(11, 10);
  const SampledPath y2 = seeded(12, 10);
  const SampledPath w1 = seeded(13, 10);
  const SampledPath w2 = seeded(14, 10);
  const SecondLevel xx = second_level(y1, w1, kParams, fam(), 8);
  REQUIRE(xx.nodes() == 1025);

  const Eigen::VectorXd y = y1.restrict(0.0, 1.0).values().col(0);
  const Eigen::VectorXd w = w1.restrict(0.0, 1.0).values().col(0);
  double scale = 0.0;
  for (Eigen::Index t = 0; t < xx.nodes(); ++t) scale = std::max(scale, std::abs(xx(0, t)));
  Gen gen(10);
  for (int trial = 0; trial < 500; ++trial) {
    std::array<Eigen::Index, 3> idx{gen.integer(0, 1024), gen.integer(0, 1024), gen.integer(0, 1024)};
    std::sort(idx.begin(), idx.end());
    const auto [s, t, u] = idx;
    const double defect = xx(s, u) - xx(s, t) - xx(t, u);
    CHECK(std::abs(defect - (y(t) - y(s)) * (w(u) - w(t))) <= 1e-9 * scale);
  }

  const double a = 1.7;
  const double b = -0.6;
  const SecondLevel mix_y = second_level(combine(a, y1, b, y2), w1, kParams, fam(), 8, 7);
  const SecondLevel part_y1 = second_level(y1, w1, kParams, fam(), 8, 7);
  const SecondLevel part_y2 = second_level(y2, w1, kParams, fam(), 8, 7);
  const SecondLevel mix_w = second_level(y1, combine(a, w1, b, w2), kParams, fam(), 8, 7);
  const SecondLevel part_w2 = second_level(y1, w2, kParams, fam(), 8, 7);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Index s = gen.integer(0, 128);
    Eigen::Index t = gen.integer(0, 128);
    if (s > t) std::swap(s, t);
    const double lin_y = a * part_y1(s, t) + b * part_y2(s, t);
    const double lin_w = a * part_y1(s, t) + b * part_w2(s, t);
    CHECK(std::abs(mix_y(s, t) - lin_y) < 1e-12 * (1.0 + std::abs(lin_y)));
    CHECK(std::abs(mix_w(s, t) - lin_w) < 1e-12 * (1.0 + std::abs(lin_w)));
  }
}

TEST_CASE("assemble_lift: zero input gives the identity path") {
  const SampledPath zero(Eigen::MatrixXd::Zero(257, 2), 0.0, 1.0, 8);
  const Lift lift = lift_path(zero, kParams, fam(), {6, std::nullopt});
  CHECK(lift.path.level1().cwiseAbs().maxCoeff() == 0.0);
  CHECK(lift.path.level2().cwiseAbs().maxCoeff() == 0.0);
  CHECK(lift.path.level() == 6);
}

TEST_CASE("lift_path: Chen, weak geometricity and level-1 projection at three resolutions") {
  const SampledPath x = generate_sobolev_path(kParams, 21, 11, 2);
  Gen gen(12);
  for (const int out : {6, 8, 9}) {
    const Lift lift = lift_path(x, kParams, fam(), {8, out});
    const GroupPath& path = lift.path;
    REQUIRE(path.level() == out);
    const double scale = path.scale();

    const Eigen::Index stride = Eigen::Index{1} << (x.level() - out);
    for (Eigen::Index t = 0; t < path.nodes(); ++t)
      for (Eigen::Index c = 0; c < 2; ++c) CHECK(path.level1()(t, c) == x.values()(t * stride, c));

    for (int trial = 0; trial < 200; ++trial) {
      const auto last = static_cast<int>(path.nodes() - 1);
      std::array<Eigen::Index, 3> idx{gen.integer(0, last), gen.integer(0, last), gen.integer(0, last)};
      std::sort(idx.begin(), idx.end());
      const GroupElementd direct = path.increment(idx[0], idx[2]);
      const GroupElementd chained = tensor_mul(path.increment(idx[0], idx[1]), path.increment(idx[1], idx[2]));
      CHECK((direct.level2 - chained.level2).cwiseAbs().maxCoeff() <= 1e-9 * scale);
      CHECK(membership_defect(direct) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("lift_path: one-dimensional lift is forced to X^2 / 2") {
  const SampledPath x = generate_sobolev_path(kParams, 5, 10, 1);
  const Lift lift = lift_path(x, kParams, fam(), {8, std::nullopt});
  for (Eigen::Index t = 0; t < lift.path.nodes(); ++t) {
    const double v = lift.path.level1()(t, 0);
    CHECK(lift.path.level2()(t, 0) == doctest::Approx(0.5 * v * v).epsilon(1e-12).scale(1e-300));
  }
}

TEST_CASE("lift_path: smooth pair is a valid G2 path near its signature") {
  const SampledPath x = sample([](double t, Eigen::Index c) { return c == 0 ? sin2pi(t) : cos2pi(t); }, 0.0, 1.0, 11);
  const Lift lift = lift_path(x, kParams, fam(), {9, std::nullopt});
  CHECK(all_pass(check_invariants(lift.path, 500, 1)));
  const GroupPath sig = signature2_pl(subsample(x, lift.path.level()));
  const RhoMetric rho = rho_metric(lift.path, sig, kParams);
  CHECK(std::isfinite(rho.total()));
  MESSAGE("rho(lift, signature) = " << rho.level1 << " + " << rho.level2);
  // the signature accumulates level 1 by summation
  CHECK(rho.level1 < 1e-14);
}

TEST_CASE("lift_path: argument checks") {
  const SampledPath x = generate_sobolev_path(kParams, 5, 8, 2);
  CHECK(error_of([&] { lift_path(x, kParams, fam(), {7, std::nullopt}); }) == ErrorCode::GridMismatch);
  CHECK(error_of([&] { lift_path(x, kParams, fam(), {6, 9}); }) == ErrorCode::GridMismatch);
  const SampledPath shifted(x.values(), 1.0, 2.0, 8);
  CHECK(error_of([&] { lift_path(shifted, kParams, fam(), {6, std::nullopt}); }) == ErrorCode::GridMismatch);
}

TEST_CASE("rough_sobolev_norm: constant path and linear closed form") {
  const SampledPath flat(Eigen::MatrixXd::Constant(513, 2, 4.0), 0.0, 1.0, 9);
  CHECK(rough_sobolev_norm(signature2_pl(flat), kParams) == 0.0);

  const Eigen::Vector2d c(0.8, -1.1);
  const SampledPath line = sample([&](double t, Eigen::Index i) { return c(i) * t; }, 0.0, 1.0, 10, 2);
  const double beta = (1.0 - kParams.alpha) * kParams.p;
  const double exact = c.norm() * std::pow(2.0 / (beta * (beta + 1.0)), 1.0 / kParams.p);
  CHECK(rough_sobolev_norm(signature2_pl(line), kParams) == doctest::Approx(exact).epsilon(0.05));
}

TEST_CASE("rough_sobolev_norm: stable under N -> N+2 on a fixed grid") {
  const SampledPath x = generate_sobolev_path(kParams, 31, 12, 2);
  const double a = rough_sobolev_norm(lift_path(x, kParams, fam(), {8, 8}).path, kParams);
  const double b = rough_sobolev_norm(lift_path(x, kParams, fam(), {10, 8}).path, kParams);
  CHECK(std::abs(a - b) / b < 0.05);
}

TEST_CASE("reconstruction_bound_diagnostic: constant Y, family stability, truncation stability") {
  const SobolevModel smooth_model = build_model(smooth(cos2pi, 12), kParams, fam(), 10);
  const BoundDiagnostic flat = reconstruction_bound_diagnostic(make_modelled_distribution(constant_wide(1.0, 12), kParams),
                                                               smooth_model, kParams, fam(), 10);
  const BoundDiagnostic rough = reconstruction_bound_diagnostic(make_modelled_distribution(seeded(41, 12), kParams),
                                                                smooth_model, kParams, fam(), 10);
  // Vanishes as N grows; at finite N only the truncation residue of W is left.
  CHECK(flat.ratio() < 1e-3 * rough.ratio());

  double lo = INFINITY;
  double hi = 0.0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const SobolevModel model = build_model(seeded(2 * seed, 10), kParams, fam(), 8);
    const ModelledDistribution y = make_modelled_distribution(seeded(2 * seed + 1, 10), kParams);
    const double r = reconstruction_bound_diagnostic(y, model, kParams, fam(), 8).ratio();
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo <= 10.0);

  const SampledPath w = seeded(50, 12);
  const ModelledDistribution y = make_modelled_distribution(seeded(51, 12), kParams);
  const double r8 = reconstruction_bound_diagnostic(y, build_model(w, kParams, fam(), 8), kParams, fam(), 8).ratio();
  const double r10 = reconstruction_bound_diagnostic(y, build_model(w, kParams, fam(), 10), kParams, fam(), 10).ratio();
  CHECK(std::abs(r8 - r10) / r10 < 0.10);
}
