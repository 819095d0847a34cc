#pragma once

#include <cstdint>
#include <span>

namespace pacwrap {

// Class-conditional split-conformal thresholds. Marginal validity only:
// averaged over calibration draws, not conditional on a single draw.
struct ConformalThresholds {
  double t_fp = 0.0;  // flag anomaly iff score > t_fp
  double t_fn = 0.0;  // declare normal iff score < t_fn
  double eps = 0.05;
  std::int64_t n_nm = 0;
  std::int64_t n_ano = 0;
};

// Rank r = ceil((n + 1)(1 - eps)), clamped to [1, n]. t_fp is the r-th
// smallest normal score and t_fn the r-th largest anomaly score.
// Throws Error if either class is empty, std::domain_error for eps outside (0, 1).
ConformalThresholds calibrate_conformal(std::span<const double> normal_scores,
                                        std::span<const double> anomaly_scores, double eps);

std::int64_t conformal_rank(std::int64_t n, double eps);

}  // namespace pacwrap
