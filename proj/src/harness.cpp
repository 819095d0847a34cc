#include "pacwrap/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "pacwrap/conformal.hpp"
#include "pacwrap/random.hpp"

namespace pacwrap {

ConfusionCounts confusion(std::span<const Prediction> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw Error("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                std::to_string(labels.size()) + " labels");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y != 0 && y != 1) throw Error("confusion: label " + std::to_string(y) + " is not binary");
    switch (predictions[i].verdict) {
      case Verdict::Abstain: ++c.abstained; break;
      case Verdict::Anomaly: ++(y == 1 ? c.tp : c.fp); break;
      case Verdict::Normal: ++(y == 0 ? c.tn : c.fn); break;
    }
  }
  return c;
}

Rates rates(const ConfusionCounts& c) {
  auto ratio = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
    if (den <= 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  return {ratio(c.fp, c.fp + c.tn), ratio(c.fn, c.fn + c.tp),
          ratio(c.fn + c.fp, c.fn + c.tp + c.fp + c.tn)};
}

double ambiguity_fraction(std::span<const double> scores, const WrappedDetector& detector) {
  if (scores.empty()) throw Error("ambiguity_fraction: empty score list");
  if (detector.final_tau())
    throw ModeUnavailable("ambiguity_fraction: a collapsed detector has no ambiguity region");
  const auto n = std::count_if(scores.begin(), scores.end(), [&](double s) {
    return intersect(s, detector).verdict == Verdict::Abstain;
  });
  return static_cast<double>(n) / static_cast<double>(scores.size());
}

Population Population::from_samples(std::span<const ScoredSample> labeled) {
  Population p;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto& s = labeled[i];
    if (!s.label) throw Error("population sample " + std::to_string(i) + " has no label");
    (*s.label == 1 ? p.anomaly : p.normal).push_back(s.score);
  }
  return p;
}

ResampleSpec ResampleSpec::from_ratio(std::int64_t size, double anomaly_ratio) {
  if (size < 0 || !(anomaly_ratio >= 0.0 && anomaly_ratio <= 1.0))
    throw std::domain_error("resample: size must be >= 0 and ratio in [0, 1]");
  const auto n_anomaly = static_cast<std::int64_t>(std::llround(size * anomaly_ratio));
  return {size - n_anomaly, n_anomaly};
}

namespace {

// Sorted copy of the population with O(log n) tail counts.
class SortedScores {
 public:
  explicit SortedScores(std::span<const double> scores) : v_(scores.begin(), scores.end()) {
    std::sort(v_.begin(), v_.end());
  }
  std::int64_t size() const { return static_cast<std::int64_t>(v_.size()); }
  std::int64_t count_above(double t) const {
    return v_.end() - std::upper_bound(v_.begin(), v_.end(), t);
  }
  std::int64_t count_at_or_above(double t) const {
    return v_.end() - std::lower_bound(v_.begin(), v_.end(), t);
  }
  std::int64_t count_below(double t) const {
    return std::lower_bound(v_.begin(), v_.end(), t) - v_.begin();
  }
  // Scores on which intersect() abstains: (s > fp) xor (s >= fn).
  std::int64_t count_abstain(double tau_fn, double tau_fp) const {
    const auto above_fp = count_above(tau_fp);
    const auto from_fn = count_at_or_above(tau_fn);
    return above_fp > from_fn ? above_fp - from_fn : from_fn - above_fp;
  }

 private:
  std::vector<double> v_;
};

struct PreparedPopulation {
  SortedScores normal;
  SortedScores anomaly;
  SortedScores all;
  std::int64_t total;
};

PreparedPopulation prepare(const Population& population) {
  require_finite(population.normal);
  require_finite(population.anomaly);
  if (population.normal.empty() || population.anomaly.empty())
    throw Error("population needs both normal and anomaly scores");
  std::vector<double> all(population.normal);
  all.insert(all.end(), population.anomaly.begin(), population.anomaly.end());
  const auto total = static_cast<std::int64_t>(all.size());
  return {SortedScores(population.normal), SortedScores(population.anomaly), SortedScores(all),
          total};
}

struct Resample {
  std::vector<double> normal;
  std::vector<double> anomaly;
};

// Trial t always sees the same draw for a given seed, whatever the worker count.
Resample draw(const Population& population, const ResampleSpec& spec, std::uint64_t seed,
              std::int64_t trial) {
  Rng rng(seed, static_cast<std::uint64_t>(trial));
  Resample r;
  r.normal.resize(static_cast<std::size_t>(spec.n_normal));
  r.anomaly.resize(static_cast<std::size_t>(spec.n_anomaly));
  for (auto& x : r.normal) x = population.normal[rng.index(population.normal.size())];
  for (auto& x : r.anomaly) x = population.anomaly[rng.index(population.anomaly.size())];
  return r;
}

template <typename Body>
void parallel_trials(std::int64_t trials, unsigned workers, Body&& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || trials < 2) {
    for (std::int64_t t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t t = w; t < trials; t += workers) body(t);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ResampleSpec resolve(const ResampleSpec& spec, const Population& population) {
  if (spec.n_normal == 0 && spec.n_anomaly == 0)
    return {static_cast<std::int64_t>(population.normal.size()),
            static_cast<std::int64_t>(population.anomaly.size())};
  return spec;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::int64_t count_above(const std::vector<double>& v, double eps) {
  return std::count_if(v.begin(), v.end(), [&](double r) { return r > eps; });
}

double rate(std::int64_t num, std::int64_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

void validate_options(const MonteCarloOptions& options) {
  if (options.trials < 1) throw std::domain_error("Monte Carlo needs at least one trial");
}

// Surfaces InsufficientCalibration once, before any trial runs.
std::int64_t budget_or_throw(std::int64_t n, const PacParams& params, ScoreClass side) {
  params.validate();
  const auto k = n > 0 ? k_star(n, params) : std::nullopt;
  if (!k)
    throw InsufficientCalibration(side, static_cast<std::size_t>(n),
                                  static_cast<std::size_t>(min_sample_size(params)));
  return *k;
}

}  // namespace

ValidationReport mc_validate(const Population& population, const PacParams& params_fn,
                             const PacParams& params_fp, const MonteCarloOptions& options) {
  validate_options(options);
  const auto pop = prepare(population);
  const auto spec = resolve(options.resample, population);

  ValidationReport report;
  report.trials = options.trials;
  report.seed = options.seed;
  report.rng = Rng::kAlgorithm;
  report.params_fn = params_fn;
  report.params_fp = params_fp;
  report.resample = spec;
  report.population_normal = pop.normal.size();
  report.population_anomaly = pop.anomaly.size();

  report.k_star_fp = budget_or_throw(spec.n_normal, params_fp, ScoreClass::Normal);
  report.k_star_fn = budget_or_throw(spec.n_anomaly, params_fn, ScoreClass::Anomaly);

  const auto n = static_cast<std::size_t>(options.trials);
  report.per_trial_fpr.resize(n);
  report.per_trial_fnr.resize(n);
  report.per_trial_ambiguity.resize(n);

  parallel_trials(options.trials, options.workers, [&](std::int64_t t) {
    const auto sample = draw(population, spec, options.seed, t);
    const auto fp = calibrate_fp(sample.normal, params_fp);
    const auto fn = calibrate_fn(sample.anomaly, params_fn);
    const auto i = static_cast<std::size_t>(t);
    report.per_trial_fpr[i] = rate(pop.normal.count_above(fp.tau), pop.normal.size());
    report.per_trial_fnr[i] = rate(pop.anomaly.count_below(fn.tau), pop.anomaly.size());
    report.per_trial_ambiguity[i] = rate(pop.all.count_abstain(fn.tau, fp.tau), pop.total);
  });

  report.fpr_violations = count_above(report.per_trial_fpr, params_fp.eps);
  report.fnr_violations = count_above(report.per_trial_fnr, params_fn.eps);
  report.fpr_violation_interval = clopper_pearson(report.fpr_violations, options.trials, 0.95);
  report.fnr_violation_interval = clopper_pearson(report.fnr_violations, options.trials, 0.95);
  report.mean_fpr = mean(report.per_trial_fpr);
  report.mean_fnr = mean(report.per_trial_fnr);
  report.mean_ambiguity = mean(report.per_trial_ambiguity);
  return report;
}

BaselineComparison compare_baseline(const Population& population, const PacParams& params_fn,
                                    const PacParams& params_fp, const MonteCarloOptions& options) {
  validate_options(options);
  const auto pop = prepare(population);
  const auto spec = resolve(options.resample, population);
  budget_or_throw(spec.n_normal, params_fp, ScoreClass::Normal);
  budget_or_throw(spec.n_anomaly, params_fn, ScoreClass::Anomaly);

  const auto n = static_cast<std::size_t>(options.trials);
  struct Rates3 {
    std::vector<double> fpr, fnr, amb;
  };
  Rates3 pac{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  Rates3 cp = pac;

  parallel_trials(options.trials, options.workers, [&](std::int64_t t) {
    const auto sample = draw(population, spec, options.seed, t);
    const auto i = static_cast<std::size_t>(t);

    const auto fp = calibrate_fp(sample.normal, params_fp);
    const auto fn = calibrate_fn(sample.anomaly, params_fn);
    pac.fpr[i] = rate(pop.normal.count_above(fp.tau), pop.normal.size());
    pac.fnr[i] = rate(pop.anomaly.count_below(fn.tau), pop.anomaly.size());
    pac.amb[i] = rate(pop.all.count_abstain(fn.tau, fp.tau), pop.total);

    const double t_fp = calibrate_conformal(sample.normal, sample.anomaly, params_fp.eps).t_fp;
    const double t_fn = calibrate_conformal(sample.normal, sample.anomaly, params_fn.eps).t_fn;
    cp.fpr[i] = rate(pop.normal.count_above(t_fp), pop.normal.size());
    cp.fnr[i] = rate(pop.anomaly.count_below(t_fn), pop.anomaly.size());
    cp.amb[i] = rate(pop.all.count_abstain(t_fn, t_fp), pop.total);
  });

  auto summarize = [&](const Rates3& r) {
    MethodSummary m;
    m.fpr_violations = count_above(r.fpr, params_fp.eps);
    m.fnr_violations = count_above(r.fnr, params_fn.eps);
    m.fpr_violation_interval = clopper_pearson(m.fpr_violations, options.trials, 0.95);
    m.fnr_violation_interval = clopper_pearson(m.fnr_violations, options.trials, 0.95);
    m.mean_fpr = mean(r.fpr);
    m.mean_fnr = mean(r.fnr);
    m.mean_ambiguity = mean(r.amb);
    return m;
  };

  BaselineComparison out;
  out.trials = options.trials;
  out.seed = options.seed;
  out.rng = Rng::kAlgorithm;
  out.params_fn = params_fn;
  out.params_fp = params_fp;
  out.resample = spec;
  out.pac = summarize(pac);
  out.conformal = summarize(cp);
  return out;
}

std::vector<SweepCell> sweep_ambiguity(const Population& population,
                                       std::span<const double> eps_grid,
                                       std::span<const double> delta_grid,
                                       const SweepOptions& options) {
  if (options.resample_calibration && options.trials_per_cell < 1)
    throw std::domain_error("sweep needs at least one trial per cell");
  const auto pop = prepare(population);
  const auto spec = options.resample_calibration
                        ? resolve(options.resample, population)
                        : ResampleSpec{pop.normal.size(), pop.anomaly.size()};
  const std::int64_t trials = options.resample_calibration ? options.trials_per_cell : 1;

  std::vector<SweepCell> cells;
  for (double eps : eps_grid) {
    for (double delta : delta_grid) {
      const PacParams p{eps, delta};
      p.validate();
      SweepCell cell{eps, delta, false, 0.0, 0.0, 0};
      const auto need = min_sample_size(p);
      cell.feasible = spec.n_normal >= need && spec.n_anomaly >= need;
      cells.push_back(cell);
    }
  }

  // values[t][cell]
  std::vector<std::vector<double>> values(static_cast<std::size_t>(trials),
                                          std::vector<double>(cells.size(), 0.0));
  parallel_trials(trials, options.workers, [&](std::int64_t t) {
    Resample sample;
    if (options.resample_calibration) {
      sample = draw(population, spec, options.seed, t);
    } else {
      sample = {population.normal, population.anomaly};
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!cells[c].feasible) continue;
      const PacParams p{cells[c].eps, cells[c].delta};
      const auto fp = calibrate_fp(sample.normal, p);
      const auto fn = calibrate_fn(sample.anomaly, p);
      values[static_cast<std::size_t>(t)][c] = rate(pop.all.count_abstain(fn.tau, fp.tau), pop.total);
    }
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!cells[c].feasible) continue;
    double sum = 0.0;
    for (const auto& row : values) sum += row[c];
    const double m = sum / static_cast<double>(trials);
    double ss = 0.0;
    for (const auto& row : values) ss += (row[c] - m) * (row[c] - m);
    cells[c].mean_ambiguity = m;
    cells[c].stderr_ambiguity =
        trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) / std::sqrt(double(trials))
                   : 0.0;
    cells[c].trials = trials;
  }
  return cells;
}

}  // namespace pacwrap
