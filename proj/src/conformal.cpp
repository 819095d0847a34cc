#include "pacwrap/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pacwrap/errors.hpp"
#include "pacwrap/types.hpp"

namespace pacwrap {

std::int64_t conformal_rank(std::int64_t n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("conformal_rank: eps must lie in (0, 1)");
  if (n < 1) throw std::domain_error("conformal_rank: n must be >= 1");
  // Guard against (n + 1)(1 - eps) landing a hair above an integer.
  const double raw = static_cast<double>(n + 1) * (1.0 - eps);
  auto r = static_cast<std::int64_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::int64_t>(r, 1, n);
}

ConformalThresholds calibrate_conformal(std::span<const double> normal_scores,
                                        std::span<const double> anomaly_scores, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("calibrate_conformal: eps must lie in (0, 1)");
  if (normal_scores.empty() || anomaly_scores.empty())
    throw Error("calibrate_conformal: both classes need at least one calibration score");
  require_finite(normal_scores);
  require_finite(anomaly_scores);

  ConformalThresholds out;
  out.eps = eps;
  out.n_nm = static_cast<std::int64_t>(normal_scores.size());
  out.n_ano = static_cast<std::int64_t>(anomaly_scores.size());

  std::vector<double> nm(normal_scores.begin(), normal_scores.end());
  const auto r_nm = conformal_rank(out.n_nm, eps);
  std::nth_element(nm.begin(), nm.begin() + (r_nm - 1), nm.end());
  out.t_fp = nm[static_cast<std::size_t>(r_nm - 1)];

  std::vector<double> ano(anomaly_scores.begin(), anomaly_scores.end());
  const auto r_ano = conformal_rank(out.n_ano, eps);
  const auto pos = out.n_ano - r_ano;  // r-th largest in ascending order
  std::nth_element(ano.begin(), ano.begin() + pos, ano.end());
  out.t_fn = ano[static_cast<std::size_t>(pos)];
  return out;
}

}  // namespace pacwrap
