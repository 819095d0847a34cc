#include "pacwrap/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pacwrap/binomial.hpp"
#include "pacwrap/errors.hpp"

namespace pacwrap {

std::vector<double> scores_of(std::span<const ScoredSample> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.score);
  return out;
}

void require_finite(std::span<const double> scores) {
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (!std::isfinite(scores[i])) throw NonFiniteScore(i);
}

namespace {

PacThreshold calibrate(std::span<const double> scores, const PacParams& params,
                       CalibrationOptions options, Direction direction) {
  params.validate();
  require_finite(scores);
  const auto side = direction == Direction::FlagAbove ? ScoreClass::Normal : ScoreClass::Anomaly;
  const auto n = static_cast<std::int64_t>(scores.size());

  PacThreshold out;
  out.direction = direction;
  out.n_cal = n;
  out.params = params;

  const auto k = n > 0 ? k_star(n, params) : std::nullopt;
  if (!k) {
    if (!options.allow_trivial)
      throw InsufficientCalibration(side, scores.size(),
                                    static_cast<std::size_t>(min_sample_size(params)));
    constexpr double inf = std::numeric_limits<double>::infinity();
    out.tau = direction == Direction::FlagAbove ? inf : -inf;
    out.trivial = true;
    return out;
  }

  out.k_star = *k;
  if (*k >= n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    out.tau = direction == Direction::FlagAbove ? inf : -inf;
  } else {
    std::vector<double> sorted(scores.begin(), scores.end());
    // Ascending position of the (k*+1)-th largest or (k*+1)-th smallest score.
    const auto pos = direction == Direction::FlagAbove ? n - 1 - *k : *k;
    std::nth_element(sorted.begin(), sorted.begin() + pos, sorted.end());
    out.tau = sorted[static_cast<std::size_t>(pos)];
  }
  out.calib_violation_count = violation_count(out, scores);
  return out;
}

std::vector<double> checked_scores(std::span<const ScoredSample> samples, int expected_label) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& label = samples[i].label;
    if (label && *label != expected_label)
      throw Error("sample " + std::to_string(i) + " has label " + std::to_string(*label) +
                  ", expected " + std::to_string(expected_label));
  }
  return scores_of(samples);
}

}  // namespace

PacThreshold calibrate_fp(std::span<const double> normal_scores, const PacParams& params,
                          CalibrationOptions options) {
  return calibrate(normal_scores, params, options, Direction::FlagAbove);
}

PacThreshold calibrate_fn(std::span<const double> anomaly_scores, const PacParams& params,
                          CalibrationOptions options) {
  return calibrate(anomaly_scores, params, options, Direction::MissBelow);
}

PacThreshold calibrate_fp(std::span<const ScoredSample> normal_samples, const PacParams& params,
                          CalibrationOptions options) {
  const auto scores = checked_scores(normal_samples, 0);
  return calibrate_fp(std::span<const double>(scores), params, options);
}

PacThreshold calibrate_fn(std::span<const ScoredSample> anomaly_samples, const PacParams& params,
                          CalibrationOptions options) {
  const auto scores = checked_scores(anomaly_samples, 1);
  return calibrate_fn(std::span<const double>(scores), params, options);
}

bool violates(const PacThreshold& threshold, double score) {
  return threshold.direction == Direction::FlagAbove ? score > threshold.tau
                                                     : score < threshold.tau;
}

std::int64_t violation_count(const PacThreshold& threshold, std::span<const double> scores) {
  return std::count_if(scores.begin(), scores.end(),
                       [&](double s) { return violates(threshold, s); });
}

double empirical_loss(const PacThreshold& threshold, std::span<const double> scores) {
  if (scores.empty()) throw Error("empirical_loss: empty score list");
  return static_cast<double>(violation_count(threshold, scores)) /
         static_cast<double>(scores.size());
}

}  // namespace pacwrap
