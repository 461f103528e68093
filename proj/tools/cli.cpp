#include "cli.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "roughlift/error.hpp"
#include "roughlift/metrics.hpp"
#include "roughlift/path_io.hpp"
#include "roughlift/reconstruction.hpp"
#include "roughlift/report.hpp"

namespace roughlift::cli {

namespace {

struct RunConfig {
  double alpha = 0.4;
  double p = 4.0;
  std::string wavelet = "db8";
  int refine_depth = 12;
  int grid_level = 11;
  int N = 8;
  std::optional<int> output_level;
  std::uint64_t seed = 1;
  Eigen::Index dim = 2;
  std::string in;
  std::string out;
  std::string report;

  // tolerances
  int triples = 500;
  double chen_tol = 1e-9;
  double membership_tol = 1e-10;
  double spread = 4.0;
  double identity_tol = 0.01;
  double truncation_tol = 0.05;

  // experiment
  std::string kind = "lipschitz";
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<int> study_levels{6, 8, 10};
};

nlohmann::json config_json(const RunConfig& c, const std::string& command) {
  nlohmann::json j{{"command", command},
                   {"alpha", c.alpha},
                   {"p", c.p},
                   {"wavelet", c.wavelet},
                   {"refine_depth", c.refine_depth},
                   {"grid_level", c.grid_level},
                   {"N", c.N},
                   {"seed", c.seed},
                   {"dim", c.dim},
                   {"in", c.in},
                   {"out", c.out},
                   {"tolerances",
                    {{"triples", c.triples},
                     {"chen", c.chen_tol},
                     {"membership", c.membership_tol},
                     {"lipschitz_spread", c.spread},
                     {"identity", c.identity_tol},
                     {"truncation", c.truncation_tol}}}};
  if (c.output_level) j["output_level"] = *c.output_level;
  return j;
}

void emit(const nlohmann::json& report, const RunConfig& c, std::ostream& out) {
  if (!c.report.empty()) write_report(report, c.report);
  out << report.dump(2) << '\n';
}

std::string number_text(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError: return kIoError;
    case ErrorCode::GroupMembershipViolated:
    case ErrorCode::NotInGroup:
    case ErrorCode::CascadeDiverged: return kInvariantFailure;
    default: return kConfigError;
  }
}

InvariantTolerances tolerances(const RunConfig& c) { return InvariantTolerances{c.chen_tol, c.membership_tol, 0.0}; }

WaveletFamily make_family(const RunConfig& c, const SobolevParams& params) {
  WaveletFamily family = build_family(parse_wavelet(c.wavelet), c.refine_depth);
  if (!(family.regularity_margin(params) > 0.0))
    throw Error(ErrorCode::ConfigMismatch, "wavelet regularity too low for the requested (alpha, p)");
  return family;
}

SampledPath input_or_generated(const RunConfig& c, const SobolevParams& params, const WaveletFamily& family,
                               nlohmann::json& provenance) {
  if (!c.in.empty()) {
    LoadedPath loaded = load_path_csv(c.in);
    const auto& r = loaded.resampling;
    provenance = {{"source", c.in},
                  {"resampled", r.resampled},
                  {"original_samples", r.original_samples},
                  {"original_t0", r.original_t0},
                  {"original_t1", r.original_t1},
                  {"level", r.level}};
    return loaded.path;
  }
  provenance = {{"source", "generated"}, {"seed", c.seed}, {"level", c.grid_level}};
  return generate_sobolev_path(params, c.seed, c.grid_level, c.dim, family);
}

int cmd_generate(const RunConfig& c, std::ostream& out) {
  const SobolevParams params = validate_params(c.alpha, c.p);
  if (c.grid_level > kMaxGridLevel)
    throw Error(ErrorCode::ResourceLimit, "grid level " + std::to_string(c.grid_level) + " exceeds " +
                                              std::to_string(kMaxGridLevel));
  if (c.out.empty()) throw Error(ErrorCode::ConfigMismatch, "--out is required");
  const WaveletFamily family = make_family(c, params);
  const SampledPath path = generate_sobolev_path(params, c.seed, c.grid_level, c.dim, family);
  save_path_csv(path, c.out);
  out << "wrote " << path.samples() << " samples to " << c.out << '\n';
  return kPass;
}

int cmd_lift(const RunConfig& c, std::ostream& out) {
  const SobolevParams params = validate_params(c.alpha, c.p);
  const WaveletFamily family = make_family(c, params);
  if (c.in.empty()) throw Error(ErrorCode::ConfigMismatch, "--in is required");
  nlohmann::json provenance;
  const SampledPath x = input_or_generated(c, params, family, provenance);
  const Lift lift = lift_path(x, params, family, {c.N, c.output_level});

  const auto checks = check_invariants(lift.path, c.triples, c.seed, tolerances(c));
  nlohmann::json metrics{{"input", provenance},
                         {"output_level", lift.path.level()},
                         {"rough_norm", rough_sobolev_norm(lift.path, params)},
                         {"pairwise_blocks", x.dim() * (x.dim() - 1) / 2},
                         {"invariants", to_json(checks)}};
  std::vector<double> pi;
  for (const auto& m : lift.models) pi.push_back(m.pi_norm);
  metrics["pi_norm"] = pi;
  metrics["md_norm"] = lift.md_norms;
  for (const auto& check : checks)
    if (check.name == "ChenRelation") metrics["chen_max_defect"] = check.value;

  if (!c.out.empty()) {
    GroupPathMeta meta{{"alpha", number_text(c.alpha)},
                       {"p", number_text(c.p)},
                       {"N", std::to_string(c.N)},
                       {"wavelet", std::string(to_string(family.kind()))},
                       {"refine_depth", std::to_string(c.refine_depth)}};
    save_group_path_csv(lift.path, meta, c.out);
  }
  const bool pass = all_pass(checks);
  emit(make_report("lift", config_json(c, "lift"), metrics, pass, family), c, out);
  return pass ? kPass : kInvariantFailure;
}

int cmd_norms(const RunConfig& c, std::ostream& out) {
  const SobolevParams params = validate_params(c.alpha, c.p);
  const WaveletFamily family = make_family(c, params);
  nlohmann::json provenance;
  const SampledPath x = input_or_generated(c, params, family, provenance);
  const SobolevNorm norm = sobolev_norm_path(x, params);
  nlohmann::json components = nlohmann::json::array();
  for (Eigen::Index k = 0; k < x.dim(); ++k) {
    const SampledPath comp(x.values().col(k).array() - x.values()(0, k), 0.0, 1.0, x.level());
    const SampledPath ext = extend_path(comp);
    const auto pyr = function_pyramid(ext, family, max_truncation_level(x.level()));
    components.push_back({{"component", k},
                          {"sobolev", sobolev_norm_path(comp, params).total()},
                          {"wavelet_besov", besov_norm_coeffs(pyr, params.alpha, params.p)},
                          {"md_norm", md_norm(ext, params)}});
  }
  nlohmann::json metrics{{"input", provenance},
                         {"seminorm", norm.seminorm},
                         {"lp_term", norm.lp_term},
                         {"sobolev_norm", norm.total()},
                         {"components", components}};
  emit(make_report("norms", config_json(c, "norms"), metrics, true, family), c, out);
  return kPass;
}

int cmd_check(const RunConfig& c, const CLI::App& app, std::ostream& out, std::ostream& err) {
  if (c.in.empty()) throw Error(ErrorCode::ConfigMismatch, "--in is required");
  const LoadedGroupPath loaded = load_group_path_csv(c.in);
  auto mismatch = [&](const char* flag, const char* key, double value) {
    if (app.count(flag) == 0) return;
    const auto it = loaded.meta.find(key);
    if (it == loaded.meta.end()) return;
    const double stored = std::stod(it->second);
    if (std::abs(stored - value) > 1e-9 * std::max(1.0, std::abs(value)))
      throw Error(ErrorCode::ConfigMismatch, std::string(key) + " in file is " + it->second + ", flag gives " +
                                                 std::to_string(value));
  };
  mismatch("--alpha", "alpha", c.alpha);
  mismatch("--p", "p", c.p);
  mismatch("--levels", "N", c.N);
  mismatch("--refine-depth", "refine_depth", c.refine_depth);
  if (app.count("--wavelet") != 0) {
    const auto it = loaded.meta.find("wavelet");
    if (it != loaded.meta.end() && parse_wavelet(it->second) != parse_wavelet(c.wavelet))
      throw Error(ErrorCode::ConfigMismatch, "wavelet in file is " + it->second + ", flag gives " + c.wavelet);
  }

  const auto checks = check_invariants(loaded.path, c.triples, c.seed, tolerances(c));
  const bool pass = all_pass(checks);
  for (const auto& check : checks)
    if (!check.pass) err << "invariant failed: " << check.name << " (" << check.value << " > " << check.threshold << ")\n";
  nlohmann::json metrics{{"invariants", to_json(checks)}, {"meta", loaded.meta}};
  nlohmann::json failing = nlohmann::json::array();
  for (const auto& check : checks)
    if (!check.pass) failing.push_back(check.name);
  metrics["failing"] = failing;

  const auto wavelet_it = loaded.meta.find("wavelet");
  const auto depth_it = loaded.meta.find("refine_depth");
  nlohmann::json report{{"experiment", "check"},
                        {"config", config_json(c, "check")},
                        {"metrics", metrics},
                        {"pass", pass},
                        {"versions",
                         {{"wavelet", wavelet_it != loaded.meta.end() ? wavelet_it->second : c.wavelet},
                          {"refine_depth", depth_it != loaded.meta.end() ? std::stoi(depth_it->second) : c.refine_depth}}}};
  emit(report, c, out);
  return pass ? kPass : kInvariantFailure;
}

int cmd_experiment(const RunConfig& c, std::ostream& out) {
  const SobolevParams params = validate_params(c.alpha, c.p);
  const WaveletFamily family = make_family(c, params);
  nlohmann::json provenance;
  const SampledPath x = input_or_generated(c, params, family, provenance);

  LiftReport result;
  if (c.kind == "lipschitz") {
    ExperimentConfig cfg;
    cfg.params = params;
    cfg.truncation_level = c.N;
    cfg.output_level = c.output_level;
    cfg.grid_level = x.level();
    cfg.dim = x.dim();
    cfg.epsilons = c.epsilons;
    cfg.seeds = c.seeds;
    cfg.lipschitz_spread = c.spread;
    cfg.identity_tolerance = c.identity_tol;
    result = lipschitz_experiment(x, cfg, family);
  } else if (c.kind == "truncation") {
    result = truncation_study(x, params, c.study_levels, family, c.truncation_tol);
  } else if (c.kind == "oracle") {
    result = oracle_compare(x, params, c.N, family);
  } else if (c.kind == "diagnostic") {
    if (x.dim() < 2) throw Error(ErrorCode::DimensionMismatch, "diagnostic needs a path with d >= 2");
    auto extended = [&](Eigen::Index k) {
      return extend_path(SampledPath(x.values().col(k).array() - x.values()(0, k), 0.0, 1.0, x.level()));
    };
    const ModelledDistribution md = make_modelled_distribution(extended(0), params);
    const SobolevModel model = build_model(extended(1), params, family, c.N);
    const BoundDiagnostic diag = reconstruction_bound_diagnostic(md, model, params, family, c.N);
    result.experiment = "diagnostic";
    result.metrics = diagnostic_json(diag, model.pi_norm, md.norm, c.N, params, family);
    result.pass = std::isfinite(diag.ratio());
  } else {
    throw Error(ErrorCode::ConfigMismatch, "unknown experiment '" + c.kind + "'");
  }
  result.metrics["input"] = provenance;
  nlohmann::json config = config_json(c, "experiment");
  config["kind"] = c.kind;
  config["experiment"] = result.config;
  result.config = config;
  emit(make_report(result, family), c, out);
  return result.pass ? kPass : kInvariantFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"roughlift: rough path lifts of fractional Sobolev paths"};
  app.require_subcommand(1, 1);
  RunConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--alpha", c.alpha, "regularity in (1/3, 1/2)");
    sub->add_option("--p", c.p, "integrability, 1/alpha < p < inf");
    sub->add_option("--wavelet", c.wavelet, "db6 or db8");
    sub->add_option("--refine-depth", c.refine_depth, "wavelet tabulation depth in [8, 14]");
    sub->add_option("--grid-level", c.grid_level, "sampling level M of generated paths");
    sub->add_option("--levels", c.N, "truncation level N");
    sub->add_option("--output-level", c.output_level, "grid level of the lift (default max(N, 2))");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--dim", c.dim, "path dimension for generated paths");
    sub->add_option("--in", c.in, "input CSV");
    sub->add_option("--out", c.out, "output CSV");
    sub->add_option("--report", c.report, "JSON report file");
    sub->add_option("--triples", c.triples, "random triples for the Chen check");
    sub->add_option("--chen-tol", c.chen_tol, "Chen defect tolerance relative to max |level2|");
    sub->add_option("--membership-tol", c.membership_tol, "G^2 membership tolerance relative to path scale");
  };

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic W^alpha_p path");
  CLI::App* lift = app.add_subcommand("lift", "lift a path CSV to a G^2 path");
  CLI::App* norms = app.add_subcommand("norms", "Sobolev and wavelet norms of a path");
  CLI::App* check = app.add_subcommand("check", "run invariant suites on a lift file");
  CLI::App* experiment = app.add_subcommand("experiment", "lipschitz, truncation, oracle or diagnostic run");
  for (auto* sub : {generate, lift, norms, check, experiment}) add_common(sub);
  experiment->add_option("--kind", c.kind, "lipschitz | truncation | oracle | diagnostic");
  experiment->add_option("--eps", c.epsilons, "perturbation sizes");
  experiment->add_option("--seeds", c.seeds, "direction seeds");
  experiment->add_option("--study-levels", c.study_levels, "truncation levels for the study");
  experiment->add_option("--spread", c.spread, "max/min ratio allowed per seed");
  experiment->add_option("--identity-tol", c.identity_tol, "relative tolerance of rho^(1) vs seminorm");
  experiment->add_option("--truncation-tol", c.truncation_tol, "last relative change allowed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "ConfigMismatch: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (generate->parsed()) return cmd_generate(c, out);
    if (lift->parsed()) return cmd_lift(c, out);
    if (norms->parsed()) return cmd_norms(c, out);
    if (check->parsed()) return cmd_check(c, *check, out, err);
    return cmd_experiment(c, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace roughlift::cli
