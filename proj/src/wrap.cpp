#include "pacwrap/wrap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pacwrap {

WrappedDetector::WrappedDetector(PacThreshold tau_fn, PacThreshold tau_fp,
                                 std::vector<RelaxStep> relaxation_trace,
                                 std::optional<double> final_tau)
    : tau_fn_(std::move(tau_fn)),
      tau_fp_(std::move(tau_fp)),
      eps_ad_(std::max(tau_fn_.params.eps, tau_fp_.params.eps)),
      delta_ad_(tau_fn_.params.delta + tau_fp_.params.delta),
      final_tau_(final_tau),
      trace_(std::move(relaxation_trace)) {
  if (tau_fn_.direction != Direction::MissBelow || tau_fp_.direction != Direction::FlagAbove)
    throw Error("WrappedDetector: tau_fn must be MissBelow and tau_fp must be FlagAbove");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Anomaly: return "anomaly";
    case Verdict::Normal: return "normal";
    case Verdict::Abstain: return "abstain";
  }
  return "?";
}

const char* to_string(SetValue s) {
  switch (s) {
    case SetValue::EmptySet: return "empty";
    case SetValue::BothLabels: return "both";
    case SetValue::One: return "1";
    case SetValue::Zero: return "0";
  }
  return "?";
}

Prediction intersect(double score, double tau_fn, double tau_fp) {
  const bool fp_says_one = score > tau_fp;    // FP-side set is {1}
  const bool fn_says_zero = score < tau_fn;   // FN-side set is {0}
  if (fp_says_one && !fn_says_zero) return {Verdict::Anomaly, SetValue::One};
  if (!fp_says_one && fn_says_zero) return {Verdict::Normal, SetValue::Zero};
  if (fp_says_one) return {Verdict::Abstain, SetValue::EmptySet};
  return {Verdict::Abstain, SetValue::BothLabels};
}

Prediction intersect(double score, const WrappedDetector& detector) {
  return intersect(score, detector.tau_fn().tau, detector.tau_fp().tau);
}

AmbiguityRegion ambiguity_region(const WrappedDetector& detector) {
  const double fn = detector.tau_fn().tau;
  const double fp = detector.tau_fp().tau;
  if (fp <= fn) return {fp, fn, AmbiguityRegion::Kind::EmptyIntersection};
  return {fn, fp, AmbiguityRegion::Kind::BothLabels};
}

OrderingDiagnosis check_ordering(const WrappedDetector& detector,
                                 std::span<const double> normal_scores,
                                 std::span<const double> anomaly_scores) {
  const double fn = detector.tau_fn().tau;
  const double fp = detector.tau_fp().tau;
  OrderingDiagnosis d;
  d.ordered = detector.ordered();
  d.k_star_fp = detector.tau_fp().k_star;
  d.k_star_fn = detector.tau_fn().k_star;
  d.normals_above_fn =
      std::count_if(normal_scores.begin(), normal_scores.end(), [&](double s) { return s > fn; });
  d.anomalies_below_fp = std::count_if(anomaly_scores.begin(), anomaly_scores.end(),
                                       [&](double s) { return s < fp; });
  d.counts_within_budget = d.normals_above_fn <= d.k_star_fp && d.anomalies_below_fp <= d.k_star_fn;
  d.counts_strictly_below_budget =
      d.normals_above_fn < d.k_star_fp && d.anomalies_below_fp < d.k_star_fn;
  if (d.counts_within_budget != d.ordered)
    throw std::logic_error("check_ordering: counting condition disagrees with threshold order; "
                           "were the thresholds calibrated on these samples?");
  return d;
}

std::int64_t max_relaxation_passes(double eps0, double step) {
  return static_cast<std::int64_t>(std::ceil((1.0 - eps0) / step)) + 1;
}

namespace {

// eps0 + i * step, rounded to 12 decimals so 0.05 + 0.1 reads as 0.15.
double relaxed_eps(double eps0, double step, std::int64_t i) {
  const double raw = eps0 + static_cast<double>(i) * step;
  return std::round(raw * 1e12) / 1e12;
}

}  // namespace

WrappedDetector relax_constraints(std::span<const double> normal_scores,
                                  std::span<const double> anomaly_scores,
                                  const PacParams& initial_fn, const PacParams& initial_fp,
                                  double step) {
  if (!(step > 0.0 && step <= 1.0))
    throw std::domain_error("relax_constraints: step must lie in (0, 1]");
  initial_fn.validate();
  initial_fp.validate();
  require_finite(normal_scores);
  require_finite(anomaly_scores);

  std::vector<RelaxStep> trace;
  std::optional<PacThreshold> fn, fp;
  std::optional<InsufficientCalibration> shortfall;

  for (std::int64_t i = 0;; ++i) {
    const PacParams pfn{relaxed_eps(initial_fn.eps, step, i), initial_fn.delta};
    const PacParams pfp{relaxed_eps(initial_fp.eps, step, i), initial_fp.delta};
    if (pfn.eps > 1.0 || pfp.eps > 1.0) break;

    RelaxStep entry{pfn.eps, pfp.eps, std::nullopt, std::nullopt};
    fn.reset();
    fp.reset();
    shortfall.reset();
    try {
      fn = calibrate_fn(anomaly_scores, pfn);
      fp = calibrate_fp(normal_scores, pfp);
    } catch (const InsufficientCalibration& e) {
      shortfall = e;
    }
    if (fn) entry.tau_fn = fn->tau;
    if (fp) entry.tau_fp = fp->tau;
    trace.push_back(entry);

    if (fn && fp && fn->tau >= fp->tau) return WrappedDetector(*fn, *fp, std::move(trace));
  }

  if (shortfall) throw *shortfall;
  std::ostringstream msg;
  msg << "thresholds still misordered after relaxing eps to " << trace.back().eps_fn << " (fn) / "
      << trace.back().eps_fp << " (fp): tau_fn=" << *trace.back().tau_fn
      << " < tau_fp=" << *trace.back().tau_fp;
  throw RelaxationFailed(msg.str(), std::move(trace));
}

WrappedDetector collapse_threshold(const WrappedDetector& detector, CollapseRule rule) {
  const double lo = detector.tau_fp().tau;
  const double hi = detector.tau_fn().tau;
  if (hi < lo) {
    std::ostringstream msg;
    msg << "cannot collapse: tau_fn=" << hi << " < tau_fp=" << lo;
    throw OrderingViolation(msg.str());
  }
  double tau = 0.5 * (lo + hi);
  if (rule.custom_tau) {
    tau = *rule.custom_tau;
    if (!(tau >= lo && tau <= hi)) {
      std::ostringstream msg;
      msg << "threshold " << tau << " lies outside [" << lo << ", " << hi << "]";
      throw OutOfInterval(msg.str());
    }
  }
  if (!std::isfinite(tau)) throw OutOfInterval("collapsed threshold is not finite");
  return WrappedDetector(detector.tau_fn(), detector.tau_fp(), detector.relaxation_trace(), tau);
}

Prediction predict_final(double score, double final_tau) {
  if (score > final_tau) return {Verdict::Anomaly, SetValue::One};
  return {Verdict::Normal, SetValue::Zero};
}

std::vector<Prediction> predict_batch(std::span<const double> scores,
                                      const WrappedDetector& detector, PredictMode mode) {
  if (mode == PredictMode::FinalThreshold && !detector.final_tau())
    throw ModeUnavailable("final-threshold mode needs a collapsed detector");
  require_finite(scores);
  std::vector<Prediction> out;
  out.reserve(scores.size());
  for (double s : scores)
    out.push_back(mode == PredictMode::FinalThreshold ? predict_final(s, *detector.final_tau())
                                                      : intersect(s, detector));
  return out;
}

}  // namespace pacwrap
