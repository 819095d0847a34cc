#include "pacwrap/binomial.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pacwrap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

void check_args(std::int64_t n, double eps) {
  if (n < 1) throw std::domain_error("binomial: n must be >= 1, got " + std::to_string(n));
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::domain_error("binomial: eps must lie in [0, 1], got " + std::to_string(eps));
}

// Walks the partial sums F(0), F(1), ... in log space. The visitor receives
// (k, log F(k)) and returns false to stop.
template <typename Visit>
void walk_log_cdf(std::int64_t n, double eps, Visit&& visit) {
  const double log_odds = std::log(eps) - std::log1p(-eps);
  double log_term = static_cast<double>(n) * std::log1p(-eps);
  double log_sum = log_term;
  for (std::int64_t k = 0;; ++k) {
    if (!visit(k, log_sum) || k == n) return;
    log_term += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1)) +
                log_odds;
    log_sum = log_add(log_sum, log_term);
  }
}

double clamp_prob(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

// The log-space walk carries relative error far below this, so a CDF that
// equals delta in exact arithmetic (F(39; 79, 0.5) = 0.5) is not lost to
// rounding.
constexpr double kTieTolerance = 1e-11;

bool cdf_within(double cdf, double delta) { return cdf <= delta * (1.0 + kTieTolerance); }

}  // namespace

void PacParams::validate() const {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::domain_error("eps must lie in (0, 1], got " + std::to_string(eps));
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("delta must lie in (0, 1), got " + std::to_string(delta));
}

double binom_cdf(std::int64_t k, std::int64_t n, double eps) {
  check_args(n, eps);
  if (k < 0 || k > n)
    throw std::domain_error("binom_cdf: k must lie in [0, n], got k=" + std::to_string(k) +
                            " n=" + std::to_string(n));
  if (k == n || eps == 0.0) return 1.0;
  if (eps == 1.0) return 0.0;
  double result = 0.0;
  walk_log_cdf(n, eps, [&](std::int64_t i, double log_sum) {
    if (i < k) return true;
    result = std::exp(log_sum);
    return false;
  });
  return clamp_prob(result);
}

std::optional<std::int64_t> k_star(std::int64_t n, const PacParams& params) {
  check_args(n, params.eps);
  params.validate();
  if (params.eps == 1.0) return n - 1;  // F(k) = 0 for every k < n
  std::optional<std::int64_t> best;
  walk_log_cdf(n, params.eps, [&](std::int64_t k, double log_sum) {
    const double cdf = k == n ? 1.0 : clamp_prob(std::exp(log_sum));
    if (!cdf_within(cdf, params.delta)) return false;
    best = k;
    return true;
  });
  return best;
}

std::int64_t min_sample_size(const PacParams& params) {
  params.validate();
  if (params.eps == 1.0) return 1;
  const double log_q = std::log1p(-params.eps);
  auto feasible = [&](std::int64_t n) { return cdf_within(binom_cdf(0, n, params.eps), params.delta);
  };
  auto n = static_cast<std::int64_t>(std::ceil(std::log(params.delta) / log_q));
  if (n < 1) n = 1;
  while (!feasible(n)) ++n;
  while (n > 1 && feasible(n - 1)) --n;
  return n;
}

CPInterval clopper_pearson(std::int64_t successes, std::int64_t trials, double level) {
  if (trials < 1) throw std::domain_error("clopper_pearson: trials must be >= 1");
  if (successes < 0 || successes > trials)
    throw std::domain_error("clopper_pearson: successes must lie in [0, trials]");
  if (!(level > 0.0 && level < 1.0))
    throw std::domain_error("clopper_pearson: level must lie in (0, 1)");

  constexpr double kTol = 1e-10;
  const double tail = (1.0 - level) / 2.0;
  CPInterval out{0.0, 1.0, level, successes, trials};

  if (successes > 0) {
    // P(X >= s; p) rises with p; keep lo on the "<= tail" side.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > kTol) {
      const double mid = 0.5 * (lo + hi);
      const double upper_tail = 1.0 - binom_cdf(successes - 1, trials, mid);
      (upper_tail <= tail ? lo : hi) = mid;
    }
    out.lower = lo;
  }
  if (successes < trials) {
    // P(X <= s; p) falls with p; keep hi on the "<= tail" side.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > kTol) {
      const double mid = 0.5 * (lo + hi);
      (binom_cdf(successes, trials, mid) <= tail ? hi : lo) = mid;
    }
    out.upper = hi;
  }
  return out;
}

}  // namespace pacwrap
