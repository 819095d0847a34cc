#pragma once

#include <cstdint>
#include <optional>

#include "pacwrap/types.hpp"

namespace pacwrap {

// Binomial(n, eps) CDF at k, summed in log space with a multiplicative term
// recurrence so that n in the hundreds of thousands neither overflows nor
// underflows. Throws std::domain_error when k > n, n < 1 or eps is outside
// [0, 1].
double binom_cdf(std::int64_t k, std::int64_t n, double eps);

// Largest k in [0, n] with binom_cdf(k, n, eps) <= delta, or nullopt when
// even k = 0 exceeds delta. A CDF within 1e-11 (relative) of delta counts as
// equal, so exact ties survive floating-point rounding.
std::optional<std::int64_t> k_star(std::int64_t n, const PacParams& params);

// Smallest n for which k_star(n, params) is feasible, i.e. (1 - eps)^n <= delta.
std::int64_t min_sample_size(const PacParams& params);

// Exact two-sided Clopper-Pearson interval.
struct CPInterval {
  double lower = 0.0;
  double upper = 1.0;
  double level = 0.95;
  std::int64_t successes = 0;
  std::int64_t trials = 1;

  friend bool operator==(const CPInterval&, const CPInterval&) = default;
};

// Bounds are found by bisection on binom_cdf to a bracket width of 1e-10;
// lower is rounded down and upper rounded up so the interval never shrinks.
CPInterval clopper_pearson(std::int64_t successes, std::int64_t trials, double level = 0.95);

}  // namespace pacwrap
