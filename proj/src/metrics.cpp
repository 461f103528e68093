#include "roughlift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "roughlift/error.hpp"
#include "roughlift/numeric.hpp"
#include "roughlift/quadrature.hpp"

namespace roughlift {

namespace {

void require_same_grid(const GroupPath& a, const GroupPath& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "group paths differ in dimension");
  if (a.nodes() != b.nodes() || a.level() != b.level() || a.t0() != b.t0())
    throw Error(ErrorCode::GridMismatch, "group paths live on different grids");
}

// Squared Frobenius norm of the level-2 difference of increments (s,t).
double level2_gap_sq(const GroupPath& a, const GroupPath& b, Eigen::Index s, Eigen::Index t) {
  const Eigen::Index d = a.dim();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      const double g = a.increment_level2(s, t, i, j) - b.increment_level2(s, t, i, j);
      acc += g * g;
    }
  return acc;
}

double finite_or_inf(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

}  // namespace

RhoMetric rho_metric(const GroupPath& a, const GroupPath& b, const SobolevParams& params) {
  require_same_grid(a, b);
  const double p = params.p;
  const KernelQuadrature quad(a.nodes(), a.spacing(), params.alpha * p + 1.0);
  const Eigen::MatrixXd diff = a.level1() - b.level1();
  const Eigen::MatrixXd diff_t = diff.transpose();

  const double first = quad.symmetric([&](Eigen::Index s, Eigen::Index t) {
    return power((diff_t.col(t) - diff_t.col(s)).squaredNorm(), 0.5 * p);
  });
  const double second = quad.ordered([&](Eigen::Index s, Eigen::Index t) {
    return std::pair{power(level2_gap_sq(a, b, s, t), 0.25 * p), power(level2_gap_sq(a, b, t, s), 0.25 * p)};
  });
  return RhoMetric{std::pow(first, 1.0 / p), std::pow(second, 2.0 / p)};
}

double second_level_distance(const SecondLevel& a, const SecondLevel& b, const SobolevParams& params) {
  if (a.nodes() != b.nodes() || a.level() != b.level())
    throw Error(ErrorCode::GridMismatch, "second levels live on different grids");
  const KernelQuadrature quad(a.nodes(), std::ldexp(1.0, -a.level()), params.alpha * params.p + 1.0);
  const double half_p = 0.5 * params.p;
  const double total =
      quad.upper([&](Eigen::Index s, Eigen::Index t) { return power(std::abs(a(s, t) - b(s, t)), half_p); });
  return std::pow(total, 1.0 / half_p);
}

std::vector<InvariantCheck> check_invariants(const GroupPath& path, int triples, std::uint64_t seed,
                                             const InvariantTolerances& tol) {
  std::vector<InvariantCheck> out;

  const double level2_max = std::max(path.level2().cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> node(0, path.nodes() - 1);
  double chen = 0.0;
  for (int k = 0; k < triples; ++k) {
    Eigen::Index idx[3] = {node(rng), node(rng), node(rng)};
    std::sort(idx, idx + 3);
    const GroupElementd whole = path.increment(idx[0], idx[2]);
    const GroupElementd parts = tensor_mul(path.increment(idx[0], idx[1]), path.increment(idx[1], idx[2]));
    chen = std::max({chen, (whole.level1 - parts.level1).cwiseAbs().maxCoeff(),
                     (whole.level2 - parts.level2).cwiseAbs().maxCoeff()});
  }
  out.push_back({"ChenRelation", chen / level2_max, tol.chen, chen <= tol.chen * level2_max});

  const double scale = std::max(path.scale(), std::numeric_limits<double>::min());
  double defect = 0.0;
  for (Eigen::Index t = 0; t < path.nodes(); ++t) defect = std::max(defect, membership_defect(path.element(t)));
  out.push_back({"GroupMembershipViolated", defect / scale, tol.membership, defect <= tol.membership * scale});

  const double start = std::max(path.level1().row(0).cwiseAbs().maxCoeff(), path.level2().row(0).cwiseAbs().maxCoeff());
  out.push_back({"IdentityAtStart", start, tol.identity, start <= tol.identity});
  return out;
}

bool all_pass(const std::vector<InvariantCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

nlohmann::json to_json(const std::vector<InvariantCheck>& checks) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks)
    out.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  return out;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"alpha", params.alpha},
                   {"p", params.p},
                   {"N", truncation_level},
                   {"grid_level", grid_level},
                   {"dim", dim},
                   {"epsilons", epsilons},
                   {"seeds", seeds},
                   {"lipschitz_spread", lipschitz_spread},
                   {"identity_tolerance", identity_tolerance}};
  if (output_level) j["output_level"] = *output_level;
  return j;
}

SampledPath subsample(const SampledPath& path, int level) {
  if (level > path.level() || level < 0)
    throw Error(ErrorCode::GridMismatch, "subsample level must not exceed the sampling level");
  const Eigen::Index stride = Eigen::Index{1} << (path.level() - level);
  const Eigen::Index count = path.cells() / stride + 1;
  Eigen::MatrixXd v(count, path.dim());
  for (Eigen::Index i = 0; i < count; ++i) v.row(i) = path.values().row(i * stride);
  return SampledPath(std::move(v), path.t0(), path.t1(), level);
}

LiftReport lipschitz_experiment(const SampledPath& x, const ExperimentConfig& config,
                                const WaveletFamily& family) {
  if (config.epsilons.size() < 3)
    throw Error(ErrorCode::ConfigMismatch, "need at least 3 perturbation sizes");
  for (const double eps : config.epsilons)
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::ConfigMismatch, "perturbation sizes must lie in (0, 1)");
  const SobolevParams& params = config.params;
  const LiftOptions options{config.truncation_level, config.output_level};
  const Lift base = lift_path(x, params, family, options);
  const int out_level = base.path.level();

  LiftReport report{"lipschitz", config.to_json(), nlohmann::json::object(), true, {}};
  nlohmann::json per_seed = nlohmann::json::array();

  for (const auto seed : config.seeds) {
    const SampledPath v = generate_sobolev_path(params, seed, x.level(), x.dim(), family);
    nlohmann::json rows = nlohmann::json::array();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double worst_identity = 0.0;
    for (const double eps : config.epsilons) {
      const SampledPath perturbed(x.values() + eps * v.values(), x.t0(), x.t1(), x.level());
      const Lift other = lift_path(perturbed, params, family, options);
      const RhoMetric rho = rho_metric(base.path, other.path, params);
      const SampledPath diff = subsample(SampledPath(perturbed.values() - x.values(), x.t0(), x.t1(), x.level()), out_level);
      const SobolevNorm norm = sobolev_norm_path(diff, params);
      const double ratio = rho.total() / norm.total();
      const double identity = std::abs(rho.level1 - norm.seminorm) / norm.seminorm;

      // Model comparison for the (0, 1) entry; Y from component 0, W from component 1.
      double model_ratio = std::numeric_limits<double>::quiet_NaN();
      if (x.dim() >= 2) {
        const Eigen::MatrixXd gap = perturbed.values() - x.values();
        auto extended_gap = [&](Eigen::Index c) {
          return extend_path(SampledPath(gap.col(c).array() - gap(0, c), 0.0, 1.0, x.level()));
        };
        const double lhs = second_level_distance(base.entries[1], other.entries[1], params);
        const double pi_gap = build_model(extended_gap(1), params, family, config.truncation_level).pi_norm;
        const double rhs = base.models[1].pi_norm * md_norm(extended_gap(0), params) + pi_gap * other.md_norms[0];
        model_ratio = rhs > 0.0 ? lhs / rhs : 0.0;
      }

      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      worst_identity = std::max(worst_identity, identity);
      rows.push_back({{"eps", eps},
                      {"rho1", rho.level1},
                      {"rho2", rho.level2},
                      {"rho", rho.total()},
                      {"norm_difference", norm.total()},
                      {"seminorm_difference", norm.seminorm},
                      {"ratio", finite_or_inf(ratio)},
                      {"identity_error", identity},
                      {"model_comparison_ratio", model_ratio}});
    }
    const double spread = hi / lo;
    const bool seed_pass = spread <= config.lipschitz_spread && worst_identity <= config.identity_tolerance;
    if (!seed_pass) {
      report.pass = false;
      report.failures.push_back("seed " + std::to_string(seed) + ": spread " + std::to_string(spread) +
                                ", identity error " + std::to_string(worst_identity));
    }
    per_seed.push_back({{"seed", seed}, {"spread", spread}, {"identity_error", worst_identity},
                        {"spread_threshold", config.lipschitz_spread}, {"identity_threshold", config.identity_tolerance},
                        {"pass", seed_pass}, {"rows", rows}});
  }
  report.metrics["seeds"] = per_seed;
  report.metrics["output_level"] = out_level;
  return report;
}

LiftReport truncation_study(const SampledPath& x, const SobolevParams& params,
                            const std::vector<int>& levels, const WaveletFamily& family,
                            double tolerance) {
  if (levels.empty()) throw Error(ErrorCode::ConfigMismatch, "no truncation levels given");
  const int out_level = std::max(*std::min_element(levels.begin(), levels.end()), 2);
  LiftReport report{"truncation", {{"alpha", params.alpha}, {"p", params.p}, {"levels", levels},
                                   {"output_level", out_level}}, nlohmann::json::object(), true, {}};
  std::vector<double> norms;
  for (const int N : levels) {
    const Lift lift = lift_path(x, params, family, {N, out_level});
    norms.push_back(rough_sobolev_norm(lift.path, params));
  }
  std::vector<double> deltas;
  for (std::size_t k = 1; k < norms.size(); ++k) deltas.push_back(std::abs(norms[k] - norms[k - 1]) / norms[k - 1]);
  report.metrics["norms"] = norms;
  report.metrics["relative_changes"] = deltas;
  report.metrics["tolerance"] = tolerance;
  report.metrics["decreasing"] = std::is_sorted(deltas.rbegin(), deltas.rend());
  for (const double n : norms)
    if (!std::isfinite(n)) {
      report.pass = false;
      report.failures.push_back("non-finite rough norm");
    }
  if (!deltas.empty() && !(deltas.back() < tolerance)) {
    report.pass = false;
    report.failures.push_back("last relative change " + std::to_string(deltas.back()) + " exceeds " +
                              std::to_string(tolerance));
  }
  return report;
}

LiftReport oracle_compare(const SampledPath& x, const SobolevParams& params, int N,
                          const WaveletFamily& family) {
  const Lift lift = lift_path(x, params, family, {N, std::nullopt});
  const GroupPath oracle = signature2_pl(subsample(x, lift.path.level()));
  const RhoMetric rho = rho_metric(lift.path, oracle, params);
  const auto lift_checks = check_invariants(lift.path, 500, 7);
  const auto oracle_checks = check_invariants(oracle, 500, 7);

  LiftReport report{"oracle", {{"alpha", params.alpha}, {"p", params.p}, {"N", N}},
                    nlohmann::json::object(), true, {}};
  report.metrics["rho1"] = rho.level1;
  report.metrics["rho2"] = rho.level2;
  report.metrics["rho"] = finite_or_inf(rho.total());
  report.metrics["lift_rough_norm"] = rough_sobolev_norm(lift.path, params);
  report.metrics["oracle_rough_norm"] = rough_sobolev_norm(oracle, params);
  report.metrics["lift_invariants"] = to_json(lift_checks);
  report.metrics["oracle_invariants"] = to_json(oracle_checks);
  if (!std::isfinite(rho.total())) {
    report.pass = false;
    report.failures.push_back("non-finite distance to the oracle");
  }
  for (const auto* checks : {&lift_checks, &oracle_checks})
    for (const auto& c : *checks)
      if (!c.pass) {
        report.pass = false;
        report.failures.push_back(c.name);
      }
  return report;
}

}  // namespace roughlift
