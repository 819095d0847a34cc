#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pacwrap/binomial.hpp"
#include "pacwrap/wrap.hpp"

namespace pacwrap {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t abstained = 0;

  std::int64_t total() const { return tp + tn + fp + fn + abstained; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// A rate with a zero denominator is nullopt, never 0.
struct Rates {
  std::optional<double> fpr;
  std::optional<double> fnr;
  std::optional<double> err;
};

// Abstentions are tallied separately and never enter TP/TN/FP/FN. Labels must
// be 0 or 1 and match predictions in length, otherwise Error is thrown.
ConfusionCounts confusion(std::span<const Prediction> predictions, std::span<const int> labels);

Rates rates(const ConfusionCounts& counts);

// Fraction of scores the wrapped detector abstains on. Requires a detector
// that has not been collapsed and a non-empty score list.
double ambiguity_fraction(std::span<const double> scores, const WrappedDetector& detector);

// Known finite population of scores, split by class.
struct Population {
  std::vector<double> normal;
  std::vector<double> anomaly;

  static Population from_samples(std::span<const ScoredSample> labeled);
};

// Per-class calibration sizes drawn (with replacement) in every trial.
struct ResampleSpec {
  std::int64_t n_normal = 0;
  std::int64_t n_anomaly = 0;

  // Total size and anomaly fraction; the anomaly count is rounded to nearest.
  static ResampleSpec from_ratio(std::int64_t size, double anomaly_ratio);
};

struct MonteCarloOptions {
  std::int64_t trials = 4000;
  std::uint64_t seed = 0;
  ResampleSpec resample;
  // Worker threads; results are identical for any value.
  unsigned workers = 1;
};

struct ValidationReport {
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::string rng;
  PacParams params_fn;
  PacParams params_fp;
  ResampleSpec resample;
  std::int64_t population_normal = 0;
  std::int64_t population_anomaly = 0;
  std::int64_t k_star_fn = 0;
  std::int64_t k_star_fp = 0;
  std::vector<double> per_trial_fpr;
  std::vector<double> per_trial_fnr;
  std::vector<double> per_trial_ambiguity;
  std::int64_t fpr_violations = 0;  // trials with FPR > eps_fp
  std::int64_t fnr_violations = 0;  // trials with FNR > eps_fn
  CPInterval fpr_violation_interval;
  CPInterval fnr_violation_interval;
  double mean_fpr = 0.0;
  double mean_fnr = 0.0;
  double mean_ambiguity = 0.0;
};

// Repeatedly resamples a calibration set from the population, calibrates both
// one-sided thresholds and measures their exact FPR/FNR over the whole
// population. Violation intervals are 95% Clopper-Pearson.
ValidationReport mc_validate(const Population& population, const PacParams& params_fn,
                             const PacParams& params_fp, const MonteCarloOptions& options);

struct MethodSummary {
  std::int64_t fpr_violations = 0;
  std::int64_t fnr_violations = 0;
  CPInterval fpr_violation_interval;
  CPInterval fnr_violation_interval;
  double mean_fpr = 0.0;
  double mean_fnr = 0.0;
  double mean_ambiguity = 0.0;
};

struct BaselineComparison {
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::string rng;
  PacParams params_fn;
  PacParams params_fp;
  ResampleSpec resample;
  MethodSummary pac;
  MethodSummary conformal;
};

// Same protocol as mc_validate, fitting the PAC thresholds and the
// split-conformal baseline on the same resample in each trial.
BaselineComparison compare_baseline(const Population& population, const PacParams& params_fn,
                                    const PacParams& params_fp, const MonteCarloOptions& options);

struct SweepOptions {
  std::int64_t trials_per_cell = 100;
  std::uint64_t seed = 0;
  ResampleSpec resample;
  // When false, each cell calibrates once on the full population classes.
  bool resample_calibration = true;
  unsigned workers = 1;
};

struct SweepCell {
  double eps = 0.0;
  double delta = 0.0;
  bool feasible = false;
  double mean_ambiguity = 0.0;
  double stderr_ambiguity = 0.0;
  std::int64_t trials = 0;
};

// Mean ambiguity over the population for every (eps, delta) pair, with
// eps_fn = eps_fp and delta_fn = delta_fp. Trial t uses the same resample in
// every cell. Cells whose sizes are below the minimum are marked infeasible.
std::vector<SweepCell> sweep_ambiguity(const Population& population,
                                       std::span<const double> eps_grid,
                                       std::span<const double> delta_grid,
                                       const SweepOptions& options);

}  // namespace pacwrap
