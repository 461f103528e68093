#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "roughlift/nilpotent_group.hpp"
#include "roughlift/path_space.hpp"
#include "roughlift/reconstruction.hpp"
#include "roughlift/wavelet.hpp"

namespace roughlift {

/// Inhomogeneous Sobolev rough-path distance, split by level:
///   rho^(k) = ( \iint |pi_k(A_{s,t} - B_{s,t})|^{p/k} / |t-s|^{alpha p + 1} )^{k/p}.
struct RhoMetric {
  double level1 = 0.0;
  double level2 = 0.0;
  double total() const { return level1 + level2; }
};

/// Both paths must share grid and dimension (GridMismatch/DimensionMismatch).
RhoMetric rho_metric(const GroupPath& a, const GroupPath& b, const SobolevParams& params);

/// ( \iint_{s<t} |a(s,t) - b(s,t)|^{p/2} / (t-s)^{alpha p + 1} )^{2/p}
double second_level_distance(const SecondLevel& a, const SecondLevel& b, const SobolevParams& params);

struct InvariantCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct InvariantTolerances {
  double chen = 1e-9;      // relative to max |level2|
  double membership = 1e-10;  // relative to the path scale
  double identity = 0.0;   // absolute, at the first node
};

/// Chen's relation over `triples` seeded random grid triples, weak
/// geometricity at every node and identity at the start. Names are
/// "ChenRelation", "GroupMembershipViolated" and "IdentityAtStart".
std::vector<InvariantCheck> check_invariants(const GroupPath& path, int triples, std::uint64_t seed,
                                             const InvariantTolerances& tol = {});

bool all_pass(const std::vector<InvariantCheck>& checks);
nlohmann::json to_json(const std::vector<InvariantCheck>& checks);

struct ExperimentConfig {
  SobolevParams params{0.4, 4.0, -0.2};
  int truncation_level = 8;
  std::optional<int> output_level;
  int grid_level = 12;
  Eigen::Index dim = 2;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double lipschitz_spread = 4.0;   // max/min ratio allowed per seed
  double identity_tolerance = 0.01;

  nlohmann::json to_json() const;
};

/// Outcome of an experiment: named metrics plus an overall verdict.
struct LiftReport {
  std::string experiment;
  nlohmann::json config;
  nlohmann::json metrics;
  bool pass = false;
  std::vector<std::string> failures;
};

/// Local Lipschitz experiment: for each seed a direction V is generated and
/// X~ = X + eps V is lifted. Reports rho(L(X), L(X~)) / ||X - X~|| per eps,
/// the identity rho^(1) = seminorm(X - X~), and the model-comparison ratio
/// for the (0, 1) second-level entry.
LiftReport lipschitz_experiment(const SampledPath& x, const ExperimentConfig& config,
                                const WaveletFamily& family);

/// Rough norms for increasing truncation levels on the grid of the smallest
/// level; passes when the last relative change is below `tolerance`.
LiftReport truncation_study(const SampledPath& x, const SobolevParams& params,
                            const std::vector<int>& levels, const WaveletFamily& family,
                            double tolerance = 0.05);

/// Reconstruction lift against the piecewise-linear signature on the same
/// grid; both are run through the invariant suite.
LiftReport oracle_compare(const SampledPath& x, const SobolevParams& params, int N,
                          const WaveletFamily& family);

/// Values of a path on the level-`level` subgrid of its window.
SampledPath subsample(const SampledPath& path, int level);

}  // namespace roughlift
