#include "pacwrap/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pacwrap/calibration.hpp"
#include "pacwrap/wrap.hpp"

using namespace pacwrap;

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

GaussianClusterSpec small_spec() {
  GaussianClusterSpec s;
  s.train_normal = 1000;
  s.cal_normal = 300;
  s.cal_anomaly = 200;
  s.test_normal = 400;
  s.test_anomaly = 100;
  s.seed = 17;
  return s;
}

}  // namespace

TEST(Clusters, DefaultSplitSizes) {
  GaussianClusterSpec spec;
  spec.seed = 3;
  const auto d = generate_clusters(spec);
  EXPECT_EQ(d.train.rows(), 100000u);
  EXPECT_EQ(d.calibration.y.size(), 4000u);
  EXPECT_EQ(d.calibration.x.rows(), 4000u);
  EXPECT_EQ(d.test.y.size(), 100000u);
  EXPECT_EQ(std::count(d.calibration.y.begin(), d.calibration.y.end(), 1), 2000);
  EXPECT_EQ(std::count(d.test.y.begin(), d.test.y.end(), 1), 50000);
}

TEST(Clusters, EmptySplits) {
  GaussianClusterSpec spec;
  spec.train_normal = spec.cal_normal = spec.cal_anomaly = spec.test_normal = spec.test_anomaly = 0;
  const auto d = generate_clusters(spec);
  EXPECT_EQ(d.train.rows(), 0u);
  EXPECT_TRUE(d.calibration.y.empty());
  EXPECT_TRUE(d.test.y.empty());
}

TEST(Clusters, MeansAndMargin) {
  GaussianClusterSpec spec;
  const auto mu = spec.mu_anomalous();
  ASSERT_EQ(mu.size(), 6u);
  EXPECT_NEAR(centroid_score(mu, spec.mu_normal()), 5.0, 1e-12);
  for (double m : mu) EXPECT_DOUBLE_EQ(m, mu[0]);
}

TEST(Clusters, InvalidParameters) {
  auto s = small_spec();
  s.dim = 0;
  EXPECT_THROW(generate_clusters(s), std::invalid_argument);
  s = small_spec();
  s.cal_normal = -1;
  EXPECT_THROW(generate_clusters(s), std::invalid_argument);
  s = small_spec();
  s.sigma2 = 0.0;
  EXPECT_THROW(generate_clusters(s), std::invalid_argument);
}

TEST(Clusters, SeedDeterminism) {
  const auto a = generate_clusters(small_spec());
  const auto b = generate_clusters(small_spec());
  EXPECT_EQ(a.train.values, b.train.values);
  EXPECT_EQ(a.calibration.x.values, b.calibration.x.values);
  EXPECT_EQ(a.test.y, b.test.y);
  auto other = small_spec();
  other.seed = 18;
  EXPECT_NE(generate_clusters(other).train.values, a.train.values);
}

TEST(Clusters, RandomVarianceStaysInRange) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = small_spec();
    s.sigma2.reset();
    s.seed = seed;
    const auto d = generate_clusters(s);
    EXPECT_GE(d.sigma2, 1.0);
    EXPECT_LE(d.sigma2, 100.0);
  }
}

TEST(Clusters, WideMarginSeparatesPerfectly) {
  auto s = small_spec();
  s.sigma2 = 1.0;
  s.margin = 1000.0;
  const auto d = generate_clusters(s);
  const auto c = empirical_centroid(d.train);
  const auto scored = score_split(d.test, c);
  double max_normal = 0.0, min_anomaly = 1e300;
  for (const auto& x : scored) {
    if (*x.label == 1)
      min_anomaly = std::min(min_anomaly, x.score);
    else
      max_normal = std::max(max_normal, x.score);
  }
  EXPECT_LT(max_normal, min_anomaly);
}

TEST(Clusters, CoordinateMeansWithinFiveStandardErrors) {
  auto s = small_spec();
  s.train_normal = 10000;
  s.cal_normal = 0;
  s.cal_anomaly = 10000;
  s.test_normal = s.test_anomaly = 0;
  const auto d = generate_clusters(s);
  const double se = std::sqrt(25.0 / 10000.0);
  const auto c_nm = empirical_centroid(d.train);
  const auto c_an = empirical_centroid(d.calibration.x);
  const auto mu = s.mu_anomalous();
  for (std::size_t j = 0; j < s.dim; ++j) {
    EXPECT_LT(std::abs(c_nm[j]), 5 * se);
    EXPECT_LT(std::abs(c_an[j] - mu[j]), 5 * se);
  }
}

TEST(CentroidScore, Examples) {
  const std::vector<double> mu{1.0, -2.0, 0.5};
  EXPECT_EQ(centroid_score(mu, mu), 0.0);
  auto x = mu;
  x[1] += 1.0;
  EXPECT_DOUBLE_EQ(centroid_score(x, mu), 1.0);
  EXPECT_THROW(centroid_score(std::vector<double>{1.0}, mu), std::invalid_argument);
}

TEST(SimulateScores, LabelsAndDeterminism) {
  const auto a = simulate_scores(300, 200, 2.0, 5);
  const auto b = simulate_scores(300, 200, 2.0, 5);
  ASSERT_EQ(a.normal.size(), 300u);
  ASSERT_EQ(a.anomaly.size(), 200u);
  EXPECT_EQ(a.normal, b.normal);
  EXPECT_EQ(a.anomaly, b.anomaly);
  for (const auto& s : a.normal) EXPECT_EQ(s.label, 0);
  for (const auto& s : a.anomaly) EXPECT_EQ(s.label, 1);
  EXPECT_NE(simulate_scores(300, 200, 2.0, 6).normal, a.normal);
}

TEST(SimulateScores, MomentsWithinFiveStandardErrors) {
  const auto s = simulate_scores(10000, 10000, 3.0, 8);
  const auto nm = scores_of(s.normal);
  const auto an = scores_of(s.anomaly);
  EXPECT_LT(std::abs(mean_of(nm)), 5 * 0.01);
  EXPECT_LT(std::abs(mean_of(an) - 3.0), 5 * 0.01);
  EXPECT_NEAR(sd_of(nm), 1.0, 0.04);
}

TEST(SimulateScores, WideSeparationHasNoOverlapCounts) {
  const auto s = simulate_scores(2000, 2000, 10.0, 9);
  const auto nm = scores_of(s.normal);
  const auto an = scores_of(s.anomaly);
  const WrappedDetector d(calibrate_fn(an, {0.05, 0.05}), calibrate_fp(nm, {0.05, 0.05}));
  const auto diag = check_ordering(d, nm, an);
  EXPECT_TRUE(diag.ordered);
  EXPECT_EQ(diag.normals_above_fn, 0);
  EXPECT_EQ(diag.anomalies_below_fp, 0);
}

TEST(SimulateScores, NoSeparationIsMisorderedAtSmallEps) {
  const auto s = simulate_scores(2000, 2000, 0.0, 10);
  const auto nm = scores_of(s.normal);
  const auto an = scores_of(s.anomaly);
  const WrappedDetector d(calibrate_fn(an, {0.05, 0.05}), calibrate_fp(nm, {0.05, 0.05}));
  EXPECT_FALSE(d.ordered());
}

TEST(SimulateScores, EmptySideFailsDownstream) {
  const auto s = simulate_scores(100, 0, 1.0, 11);
  EXPECT_TRUE(s.anomaly.empty());
  EXPECT_THROW(calibrate_fn(scores_of(s.anomaly), {0.05, 0.05}), InsufficientCalibration);
}

TEST(Shift, MeanInterpolates) {
  ShiftSpec s;
  s.gamma = 0.0;
  EXPECT_EQ(s.mean(), std::vector<double>(5, 3.0));
  s.gamma = 1.0;
  EXPECT_EQ(s.mean(), std::vector<double>(5, 0.0));
  s.gamma = 0.2;
  EXPECT_DOUBLE_EQ(s.mean()[0], 2.4);
  s.gamma = 1.5;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Shift, GammaZeroMatchesAnomaliesGammaOneMatchesNormals) {
  ShiftSpec s;
  const auto normals = scores_of(generate_shift_normals(s, 4000, 1));
  const auto at0 = scores_of(generate_shifted_test(s, 4000, 2));
  s.gamma = 1.0;
  const auto at1 = scores_of(generate_shifted_test(s, 4000, 3));
  s.gamma = 0.0;
  const auto at0b = scores_of(generate_shifted_test(s, 4000, 4));
  // 1.73 / sqrt(n / 2) is the 0.5% critical value of the two-sample KS test
  const double crit = 1.73 * std::sqrt(2.0 / 4000.0);
  EXPECT_LT(ks_statistic(at1, normals), crit);
  EXPECT_LT(ks_statistic(at0, at0b), crit);
  EXPECT_GT(ks_statistic(at0, normals), 0.5);
}

TEST(Shift, Determinism) {
  ShiftSpec s;
  s.gamma = 0.1;
  EXPECT_EQ(generate_shifted_test(s, 100, 7), generate_shifted_test(s, 100, 7));
  EXPECT_NE(generate_shifted_test(s, 100, 7), generate_shifted_test(s, 100, 8));
}

TEST(Shift, ExperimentFnrGrowsWithGamma) {
  ShiftExperimentOptions o;
  o.train_normal = 5000;
  o.test_size = 20000;
  const double g[] = {0.0, 0.1, 0.2, 0.4};
  const auto pts = run_shift_experiment(g, o);
  ASSERT_EQ(pts.size(), 4u);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_GT(pts[i].fnr, pts[i - 1].fnr);
  for (const auto& p : pts) {
    EXPECT_EQ(p.tau_fn, pts[0].tau_fn);
    EXPECT_EQ(p.fpr, pts[0].fpr);
  }
}
