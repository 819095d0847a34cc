#pragma once

#include <optional>
#include <span>
#include <vector>

namespace pacwrap {

// One detector output. Higher scores are more anomalous; label 1 marks an
// anomaly, 0 a normal point.
struct ScoredSample {
  double score = 0.0;
  std::optional<int> label;

  friend bool operator==(const ScoredSample&, const ScoredSample&) = default;
};

// Error level eps and confidence level delta of one PAC guarantee.
//
// eps may equal 1 so that constraint relaxation can make its final attempt
// at eps == 1; user-facing entry points reject that value before it gets here.
struct PacParams {
  double eps = 0.05;
  double delta = 0.05;

  // Throws std::domain_error unless 0 < eps <= 1 and 0 < delta < 1.
  void validate() const;

  friend bool operator==(const PacParams&, const PacParams&) = default;
};

std::vector<double> scores_of(std::span<const ScoredSample> samples);

// Throws NonFiniteScore on the first NaN or infinity.
void require_finite(std::span<const double> scores);

}  // namespace pacwrap
