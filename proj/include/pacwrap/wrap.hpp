#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pacwrap/calibration.hpp"
#include "pacwrap/errors.hpp"

namespace pacwrap {

// One calibration pass of the relaxation loop. Thresholds are absent when the
// sample was too small for that eps.
struct RelaxStep {
  double eps_fn = 0.0;
  double eps_fp = 0.0;
  std::optional<double> tau_fn;
  std::optional<double> tau_fp;

  friend bool operator==(const RelaxStep&, const RelaxStep&) = default;
};

// FN-side and FP-side thresholds plus the combined guarantee. Immutable once
// built; collapse_threshold returns a copy.
class WrappedDetector {
 public:
  // Throws Error if the thresholds have the wrong directions.
  WrappedDetector(PacThreshold tau_fn, PacThreshold tau_fp,
                  std::vector<RelaxStep> relaxation_trace = {},
                  std::optional<double> final_tau = std::nullopt);

  const PacThreshold& tau_fn() const { return tau_fn_; }
  const PacThreshold& tau_fp() const { return tau_fp_; }
  double eps_ad() const { return eps_ad_; }
  double delta_ad() const { return delta_ad_; }
  const std::optional<double>& final_tau() const { return final_tau_; }
  // Entry 0 is the initial calibration; each further entry is one relaxation
  // iteration.
  const std::vector<RelaxStep>& relaxation_trace() const { return trace_; }

  bool ordered() const { return tau_fn_.tau >= tau_fp_.tau; }

  friend bool operator==(const WrappedDetector&, const WrappedDetector&) = default;

 private:
  PacThreshold tau_fn_;
  PacThreshold tau_fp_;
  double eps_ad_;
  double delta_ad_;
  std::optional<double> final_tau_;
  std::vector<RelaxStep> trace_;
};

// The four cells of the intersected prediction set.
enum class SetValue { EmptySet, BothLabels, One, Zero };
enum class Verdict { Anomaly, Normal, Abstain };

struct Prediction {
  Verdict verdict = Verdict::Abstain;
  SetValue set_value = SetValue::EmptySet;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

const char* to_string(Verdict v);
const char* to_string(SetValue s);

// Intersects the two one-sided sets for a single score:
//   FP-side set is {1} iff score > tau_fp, else {0,1};
//   FN-side set is {0} iff score < tau_fn, else {0,1}.
Prediction intersect(double score, double tau_fn, double tau_fp);
Prediction intersect(double score, const WrappedDetector& detector);

struct AmbiguityRegion {
  enum class Kind { EmptyIntersection, BothLabels };
  double lower = 0.0;
  double upper = 0.0;
  Kind kind = Kind::EmptyIntersection;
};

AmbiguityRegion ambiguity_region(const WrappedDetector& detector);

// Threshold ordering plus the two counting diagnostics that characterise it.
struct OrderingDiagnosis {
  bool ordered = false;                    // tau_fn >= tau_fp
  std::int64_t normals_above_fn = 0;       // #{normal > tau_fn}
  std::int64_t anomalies_below_fp = 0;     // #{anomaly < tau_fp}
  std::int64_t k_star_fp = 0;
  std::int64_t k_star_fn = 0;
  // Both counts <= their k*. Exactly equivalent to `ordered` for
  // order-statistic thresholds; check_ordering enforces this.
  bool counts_within_budget = false;
  // Both counts < their k*. Sufficient for ordering but not necessary: it
  // misses every case where a count lands exactly on its budget (always when
  // k* = 0).
  bool counts_strictly_below_budget = false;
  bool strict_form_disagrees() const { return counts_strictly_below_budget != ordered; }
};

// Throws std::logic_error if `ordered` and `counts_within_budget` disagree,
// which would mean the thresholds were not fitted on these samples.
OrderingDiagnosis check_ordering(const WrappedDetector& detector,
                                 std::span<const double> normal_scores,
                                 std::span<const double> anomaly_scores);

class RelaxationFailed : public Error {
 public:
  RelaxationFailed(std::string what, std::vector<RelaxStep> trace)
      : Error(std::move(what)), trace_(std::move(trace)) {}
  const std::vector<RelaxStep>& trace() const { return trace_; }

 private:
  std::vector<RelaxStep> trace_;
};

// Calibrates both sides at the initial params and, while tau_fn < tau_fp,
// raises both eps values by `step` and recalibrates with unchanged deltas.
// The last attempt happens at eps == 1 when the grid lands on it. Throws
// RelaxationFailed when eps would pass 1 with the thresholds still misordered,
// and InsufficientCalibration when the last attempt was still too small.
WrappedDetector relax_constraints(std::span<const double> normal_scores,
                                  std::span<const double> anomaly_scores,
                                  const PacParams& initial_fn, const PacParams& initial_fp,
                                  double step = 0.1);

// Upper bound on calibration passes for a given start and step:
// ceil((1 - eps0) / step) + 1.
std::int64_t max_relaxation_passes(double eps0, double step);

struct CollapseRule {
  static CollapseRule midpoint() { return {}; }
  static CollapseRule custom(double tau) { return {tau}; }
  std::optional<double> custom_tau;
};

// Picks a single threshold in [tau_fp, tau_fn]. Throws OrderingViolation when
// tau_fn < tau_fp and OutOfInterval for a custom value outside the band.
WrappedDetector collapse_threshold(const WrappedDetector& detector,
                                   CollapseRule rule = CollapseRule::midpoint());

enum class PredictMode { WithAbstention, FinalThreshold };

// Anomaly iff score > final_tau, otherwise Normal.
Prediction predict_final(double score, double final_tau);

// Throws ModeUnavailable for FinalThreshold mode without a collapsed threshold.
std::vector<Prediction> predict_batch(std::span<const double> scores,
                                      const WrappedDetector& detector, PredictMode mode);

}  // namespace pacwrap
