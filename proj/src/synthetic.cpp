#include "pacwrap/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pacwrap/calibration.hpp"
#include "pacwrap/random.hpp"

namespace pacwrap {

namespace {

// Stream ids keep every split independent of the others' sizes.
enum Stream : std::uint64_t {
  kVariance = 0,
  kTrain = 1,
  kCalNormal = 2,
  kCalAnomaly = 3,
  kTestNormal = 4,
  kTestAnomaly = 5,
};

void append_gaussian_rows(FeatureMatrix& m, std::int64_t rows, std::span<const double> mean,
                          double sd, Rng& rng) {
  m.values.reserve(m.values.size() + static_cast<std::size_t>(rows) * m.dim);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < m.dim; ++j) m.values.push_back(rng.normal(mean[j], sd));
}

void require_count(std::int64_t n, const char* what) {
  if (n < 0) throw std::invalid_argument(std::string(what) + " must be >= 0");
}

std::vector<ScoredSample> draw_scored(std::span<const double> mean, double sd, std::int64_t n,
                                      std::uint64_t seed, std::span<const double> centroid,
                                      int label) {
  require_count(n, "sample count");
  Rng rng(seed);
  std::vector<double> x(mean.size());
  std::vector<ScoredSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = rng.normal(mean[j], sd);
    out.push_back({centroid_score(x, centroid), label});
  }
  return out;
}

}  // namespace

void GaussianClusterSpec::validate() const {
  if (dim == 0) throw std::invalid_argument("cluster dim must be positive");
  if (!std::isfinite(margin)) throw std::invalid_argument("cluster margin must be finite");
  if (sigma2 && !(*sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  require_count(train_normal, "train_normal");
  require_count(cal_normal, "cal_normal");
  require_count(cal_anomaly, "cal_anomaly");
  require_count(test_normal, "test_normal");
  require_count(test_anomaly, "test_anomaly");
}

std::vector<double> GaussianClusterSpec::mu_normal() const { return std::vector<double>(dim, 0.0); }

std::vector<double> GaussianClusterSpec::mu_anomalous() const {
  return std::vector<double>(dim, margin / std::sqrt(static_cast<double>(dim)));
}

ClusterData generate_clusters(const GaussianClusterSpec& spec) {
  spec.validate();
  ClusterData d;
  d.mu_normal = spec.mu_normal();
  d.mu_anomalous = spec.mu_anomalous();
  if (spec.sigma2) {
    d.sigma2 = *spec.sigma2;
  } else {
    Rng rng(spec.seed, kVariance);
    d.sigma2 = rng.uniform(1.0, 100.0);
  }
  const double sd = std::sqrt(d.sigma2);

  d.train.dim = d.calibration.x.dim = d.test.x.dim = spec.dim;

  Rng train_rng(spec.seed, kTrain);
  append_gaussian_rows(d.train, spec.train_normal, d.mu_normal, sd, train_rng);

  auto fill = [&](LabeledFeatures& split, std::int64_t n_nm, std::int64_t n_ano,
                  std::uint64_t nm_stream, std::uint64_t ano_stream) {
    Rng nm_rng(spec.seed, nm_stream);
    append_gaussian_rows(split.x, n_nm, d.mu_normal, sd, nm_rng);
    Rng ano_rng(spec.seed, ano_stream);
    append_gaussian_rows(split.x, n_ano, d.mu_anomalous, sd, ano_rng);
    split.y.assign(static_cast<std::size_t>(n_nm), 0);
    split.y.insert(split.y.end(), static_cast<std::size_t>(n_ano), 1);
  };
  fill(d.calibration, spec.cal_normal, spec.cal_anomaly, kCalNormal, kCalAnomaly);
  fill(d.test, spec.test_normal, spec.test_anomaly, kTestNormal, kTestAnomaly);
  return d;
}

double centroid_score(std::span<const double> x, std::span<const double> mu_normal) {
  if (x.size() != mu_normal.size())
    throw std::invalid_argument("centroid_score: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(mu_normal.size()) + ")");
  double ss = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) ss += (x[j] - mu_normal[j]) * (x[j] - mu_normal[j]);
  return std::sqrt(ss);
}

std::vector<double> centroid_scores(const FeatureMatrix& x, std::span<const double> centroid) {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = centroid_score(x.row(i), centroid);
  return out;
}

std::vector<double> empirical_centroid(const FeatureMatrix& x) {
  std::vector<double> c(x.dim, 0.0);
  if (x.rows() == 0) return c;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.dim; ++j) c[j] += x.values[i * x.dim + j];
  for (auto& v : c) v /= static_cast<double>(x.rows());
  return c;
}

std::vector<ScoredSample> score_split(const LabeledFeatures& split,
                                      std::span<const double> centroid) {
  std::vector<ScoredSample> out;
  out.reserve(split.y.size());
  for (std::size_t i = 0; i < split.y.size(); ++i)
    out.push_back({centroid_score(split.x.row(i), centroid), split.y[i]});
  return out;
}

SimulatedScores simulate_scores(std::int64_t n_normal, std::int64_t n_anomaly, double separation,
                                std::uint64_t seed) {
  require_count(n_normal, "n_normal");
  require_count(n_anomaly, "n_anomaly");
  if (!std::isfinite(separation)) throw std::invalid_argument("separation must be finite");
  SimulatedScores out;
  Rng nm(seed, kCalNormal);
  for (std::int64_t i = 0; i < n_normal; ++i) out.normal.push_back({nm.normal(), 0});
  Rng ano(seed, kCalAnomaly);
  for (std::int64_t i = 0; i < n_anomaly; ++i)
    out.anomaly.push_back({ano.normal(separation, 1.0), 1});
  return out;
}

void ShiftSpec::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (dim == 0) throw std::invalid_argument("shift dim must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
}

std::vector<double> ShiftSpec::mean() const {
  return std::vector<double>(dim, gamma * mu_normal + (1.0 - gamma) * mu_anomalous);
}

std::vector<ScoredSample> generate_shifted_test(const ShiftSpec& spec, std::int64_t n,
                                                std::uint64_t seed,
                                                std::span<const double> centroid) {
  spec.validate();
  const std::vector<double> origin(spec.dim, spec.mu_normal);
  return draw_scored(spec.mean(), spec.sigma, n, seed, centroid.empty() ? origin : centroid, 1);
}

std::vector<ScoredSample> generate_shift_normals(const ShiftSpec& spec, std::int64_t n,
                                                 std::uint64_t seed,
                                                 std::span<const double> centroid) {
  spec.validate();
  const std::vector<double> origin(spec.dim, spec.mu_normal);
  return draw_scored(origin, spec.sigma, n, seed, centroid.empty() ? origin : centroid, 0);
}

std::vector<ShiftPoint> run_shift_experiment(std::span<const double> gammas,
                                             const ShiftExperimentOptions& options) {
  const ShiftSpec base;
  base.validate();

  FeatureMatrix train;
  train.dim = base.dim;
  Rng train_rng(options.seed, kTrain);
  const std::vector<double> origin(base.dim, base.mu_normal);
  append_gaussian_rows(train, options.train_normal, origin, base.sigma, train_rng);
  const auto centroid = empirical_centroid(train);

  const auto cal_nm =
      scores_of(generate_shift_normals(base, options.cal_size, Rng::derive(options.seed, kCalNormal),
                                       centroid));
  const auto cal_ano = scores_of(generate_shifted_test(
      base, options.cal_size, Rng::derive(options.seed, kCalAnomaly), centroid));
  const auto fp = calibrate_fp(cal_nm, options.params);
  const auto fn = calibrate_fn(cal_ano, options.params);

  const auto test_nm = scores_of(generate_shift_normals(
      base, options.test_size, Rng::derive(options.seed, kTestNormal), centroid));
  const double fpr = empirical_loss(fp, test_nm);

  std::vector<ShiftPoint> out;
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    ShiftSpec spec = base;
    spec.gamma = gammas[g];
    const auto test_ano = scores_of(generate_shifted_test(
        spec, options.test_size, Rng::derive(options.seed, kTestAnomaly + 16 * (g + 1)), centroid));
    out.push_back({spec.gamma, empirical_loss(fn, test_ano), fpr, fn.tau, fp.tau});
  }
  return out;
}

}  // namespace pacwrap
