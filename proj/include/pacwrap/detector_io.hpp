#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "pacwrap/config.hpp"
#include "pacwrap/harness.hpp"
#include "pacwrap/wrap.hpp"

namespace pacwrap {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kDetectorSchemaVersion = 1;

// Versioned detector document:
//   {version, tau_fn, tau_fp, k_star_fn, k_star_fp, n_fn, n_fp, eps_fn,
//    eps_fp, delta_fn, delta_fp, eps_ad, delta_ad, final_tau?,
//    relaxation_trace, strictness_convention: "strict", ...}
// Reals are written as shortest round-trip decimals; the vacuous thresholds
// of a trivial calibration are written as the strings "inf" / "-inf".
ordered_json detector_to_json(const WrappedDetector& detector);

// Throws ParseError on schema mismatch.
WrappedDetector detector_from_json(const ordered_json& doc, const std::string& source);

// `config`, when non-null, is echoed under the "config" key.
void write_detector_file(const std::filesystem::path& path, const WrappedDetector& detector,
                         const ordered_json& config = nullptr);
WrappedDetector read_detector_file(const std::filesystem::path& path);

ordered_json config_to_json(const RunConfig& cfg);

ordered_json cp_interval_to_json(const CPInterval& ci);
ordered_json report_to_json(const ValidationReport& report);
// One row per trial, then a blank line and a key,value summary block.
std::string report_to_csv(const ValidationReport& report);
ordered_json comparison_to_json(const BaselineComparison& cmp);
// Long format: eps,delta,mean_ambiguity,stderr. Infeasible cells carry the
// literal "infeasible" in both value columns.
std::string sweep_to_csv(const std::vector<SweepCell>& cells);
ordered_json sweep_to_json(const std::vector<SweepCell>& cells);

// Pretty-printed with a trailing newline.
std::string dump(const ordered_json& doc);

}  // namespace pacwrap
