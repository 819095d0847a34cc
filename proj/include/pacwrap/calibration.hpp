#pragma once

#include <cstdint>
#include <span>

#include "pacwrap/types.hpp"

namespace pacwrap {

// Which one-sided rule a threshold deploys.
//   FlagAbove: FP-side, flags anomaly iff score > tau.
//   MissBelow: FN-side, declares normal iff score < tau.
// Both comparisons are strict, so a score tied with tau is never counted as a
// violation of the rule that produced tau.
enum class Direction { FlagAbove, MissBelow };

struct PacThreshold {
  double tau = 0.0;
  Direction direction = Direction::FlagAbove;
  std::int64_t k_star = 0;
  std::int64_t n_cal = 0;
  PacParams params;
  std::int64_t calib_violation_count = 0;
  // Set when calibration was infeasible and the vacuous sentinel (+inf for
  // FlagAbove, -inf for MissBelow) was returned instead of an error.
  bool trivial = false;

  friend bool operator==(const PacThreshold&, const PacThreshold&) = default;
};

struct CalibrationOptions {
  // Return the sentinel threshold instead of throwing InsufficientCalibration.
  bool allow_trivial = false;
};

// FP-side threshold from normal calibration scores: the (k*+1)-th largest
// score. At most k* calibration scores lie strictly above it.
PacThreshold calibrate_fp(std::span<const double> normal_scores, const PacParams& params,
                          CalibrationOptions options = {});

// FN-side threshold from anomaly calibration scores: the (k*+1)-th smallest
// score. At most k* calibration scores lie strictly below it.
PacThreshold calibrate_fn(std::span<const double> anomaly_scores, const PacParams& params,
                          CalibrationOptions options = {});

// Labeled-sample overloads. Samples must carry the class label (0 for the FP
// side, 1 for the FN side) or be unlabeled; a wrong label throws Error.
PacThreshold calibrate_fp(std::span<const ScoredSample> normal_samples, const PacParams& params,
                          CalibrationOptions options = {});
PacThreshold calibrate_fn(std::span<const ScoredSample> anomaly_samples, const PacParams& params,
                          CalibrationOptions options = {});

// Whether a single score violates the threshold's rule.
bool violates(const PacThreshold& threshold, double score);

std::int64_t violation_count(const PacThreshold& threshold, std::span<const double> scores);

// Fraction of scores violating the rule. Throws Error on empty input.
double empirical_loss(const PacThreshold& threshold, std::span<const double> scores);

}  // namespace pacwrap
