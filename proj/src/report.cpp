#include "roughlift/report.hpp"

#include <fstream>

#include "roughlift/error.hpp"

namespace roughlift {

nlohmann::json make_report(const std::string& experiment, const nlohmann::json& config,
                           const nlohmann::json& metrics, bool pass, const WaveletFamily& family) {
  return {{"experiment", experiment},
          {"config", config},
          {"metrics", metrics},
          {"pass", pass},
          {"versions", {{"wavelet", std::string(to_string(family.kind()))},
                        {"refine_depth", family.refine_depth()}}}};
}

nlohmann::json make_report(const LiftReport& report, const WaveletFamily& family) {
  nlohmann::json out = make_report(report.experiment, report.config, report.metrics, report.pass, family);
  out["failures"] = report.failures;
  return out;
}

nlohmann::json diagnostic_json(const BoundDiagnostic& diagnostic, double pi_norm, double md_norm, int N,
                               const SobolevParams& params, const WaveletFamily& family) {
  return {{"pi_norm", pi_norm},
          {"md_norm", md_norm},
          {"lhs", diagnostic.lhs},
          {"rhs", diagnostic.rhs},
          {"ratio", diagnostic.ratio()},
          {"N", N},
          {"alpha", params.alpha},
          {"p", params.p},
          {"wavelet", std::string(to_string(family.kind()))},
          {"refine_depth", family.refine_depth()}};
}

void write_report(const nlohmann::json& report, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + file + "' for writing");
  out << report.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + file + "'");
}

}  // namespace roughlift
