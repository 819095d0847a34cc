#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pacwrap/types.hpp"

namespace pacwrap {

// Row-major matrix of feature vectors.
struct FeatureMatrix {
  std::size_t dim = 0;
  std::vector<double> values;

  std::size_t rows() const { return dim ? values.size() / dim : 0; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * dim, dim);
  }
};

struct LabeledFeatures {
  FeatureMatrix x;
  std::vector<int> y;
};

// Two isotropic Gaussian clusters. mu_normal sits at the origin and
// mu_anomalous at (margin / sqrt(dim)) * (1, ..., 1).
struct GaussianClusterSpec {
  std::size_t dim = 6;
  double margin = 5.0;
  // Fixed variance, or nullopt to draw one uniformly from [1, 100] per dataset.
  std::optional<double> sigma2 = 25.0;
  std::int64_t train_normal = 100000;
  std::int64_t cal_normal = 2000;
  std::int64_t cal_anomaly = 2000;
  std::int64_t test_normal = 50000;
  std::int64_t test_anomaly = 50000;
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<double> mu_normal() const;
  std::vector<double> mu_anomalous() const;
};

struct ClusterData {
  FeatureMatrix train;  // normals only
  LabeledFeatures calibration;
  LabeledFeatures test;
  std::vector<double> mu_normal;
  std::vector<double> mu_anomalous;
  double sigma2 = 0.0;
};

// Throws std::invalid_argument for a zero dimension, negative counts or a
// non-positive variance.
ClusterData generate_clusters(const GaussianClusterSpec& spec);

// Euclidean distance from x to the normal centroid. Throws
// std::invalid_argument on a dimension mismatch.
double centroid_score(std::span<const double> x, std::span<const double> mu_normal);

std::vector<double> centroid_scores(const FeatureMatrix& x, std::span<const double> centroid);

// Column means of the rows.
std::vector<double> empirical_centroid(const FeatureMatrix& x);

// Scores a labeled split into ScoredSamples.
std::vector<ScoredSample> score_split(const LabeledFeatures& split,
                                      std::span<const double> centroid);

struct SimulatedScores {
  std::vector<ScoredSample> normal;   // N(0, 1), label 0
  std::vector<ScoredSample> anomaly;  // N(separation, 1), label 1
};

// One-dimensional shortcut that draws detector scores directly.
SimulatedScores simulate_scores(std::int64_t n_normal, std::int64_t n_anomaly, double separation,
                                std::uint64_t seed);

// Anomalies drawn from N(gamma * mu_normal + (1 - gamma) * mu_anomalous, sigma^2 I).
struct ShiftSpec {
  double gamma = 0.0;
  std::size_t dim = 5;
  double mu_normal = 0.0;     // every coordinate
  double mu_anomalous = 3.0;  // every coordinate
  double sigma = 2.0;

  void validate() const;
  std::vector<double> mean() const;
};

// Draws n shifted anomalies (label 1) scored by distance to `centroid`
// (defaults to mu_normal in every coordinate).
std::vector<ScoredSample> generate_shifted_test(const ShiftSpec& spec, std::int64_t n,
                                                std::uint64_t seed,
                                                std::span<const double> centroid = {});

// Normals (label 0) from N(mu_normal, sigma^2 I) scored the same way.
std::vector<ScoredSample> generate_shift_normals(const ShiftSpec& spec, std::int64_t n,
                                                 std::uint64_t seed,
                                                 std::span<const double> centroid = {});

struct ShiftPoint {
  double gamma = 0.0;
  double fnr = 0.0;  // on shifted test anomalies
  double fpr = 0.0;  // on test normals
  double tau_fn = 0.0;
  double tau_fp = 0.0;
};

struct ShiftExperimentOptions {
  std::int64_t train_normal = 98000;
  std::int64_t cal_size = 1000;    // per class
  std::int64_t test_size = 1000;   // per class and per gamma
  PacParams params{0.05, 0.05};
  std::uint64_t seed = 0;
};

// Trains the centroid scorer on normals, calibrates both thresholds on
// unshifted data, then measures FNR/FPR on test data at each gamma.
std::vector<ShiftPoint> run_shift_experiment(std::span<const double> gammas,
                                             const ShiftExperimentOptions& options);

}  // namespace pacwrap
