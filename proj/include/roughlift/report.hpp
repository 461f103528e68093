#pragma once

#include <string>

#include "json.hpp"
#include "roughlift/metrics.hpp"
#include "roughlift/wavelet.hpp"

namespace roughlift {

/// {experiment, config, metrics, pass, versions{wavelet, refine_depth}}
nlohmann::json make_report(const std::string& experiment, const nlohmann::json& config,
                           const nlohmann::json& metrics, bool pass, const WaveletFamily& family);

nlohmann::json make_report(const LiftReport& report, const WaveletFamily& family);

/// {pi_norm, md_norm, lhs, rhs, ratio, N, alpha, p, wavelet, refine_depth}
nlohmann::json diagnostic_json(const BoundDiagnostic& diagnostic, double pi_norm, double md_norm, int N,
                               const SobolevParams& params, const WaveletFamily& family);

/// Pretty-printed JSON; throws IoError if the file cannot be written.
void write_report(const nlohmann::json& report, const std::string& file);

}  // namespace roughlift
