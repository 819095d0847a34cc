#include "pacwrap/calibration.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pacwrap/binomial.hpp"
#include "pacwrap/errors.hpp"
#include "support/oracle.hpp"

using namespace pacwrap;

namespace {

std::vector<double> tenths() {
  std::vector<double> v;
  for (int i = 1; i <= 10; ++i) v.push_back(i / 10.0);
  return v;
}

std::vector<double> distinct(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  for (auto& x : v) x = z(gen);
  return v;
}

}  // namespace

TEST(CalibrateFp, TenthsAtHalf) {
  const auto t = calibrate_fp(tenths(), {0.5, 0.5});
  EXPECT_EQ(t.k_star, 4);
  EXPECT_DOUBLE_EQ(t.tau, 0.6);
  EXPECT_EQ(t.direction, Direction::FlagAbove);
  EXPECT_EQ(t.calib_violation_count, 4);
  EXPECT_EQ(violation_count(t, tenths()), 4);
  EXPECT_FALSE(t.trivial);
}

TEST(CalibrateFp, FiftyNineScoresPickTheMaximum) {
  const auto s = distinct(59, 3);
  const auto t = calibrate_fp(s, {0.05, 0.05});
  EXPECT_EQ(t.k_star, 0);
  EXPECT_EQ(t.tau, *std::max_element(s.begin(), s.end()));
  EXPECT_EQ(violation_count(t, s), 0);
}

TEST(CalibrateFp, AllTied) {
  const std::vector<double> s(100, 2.5);
  const auto t = calibrate_fp(s, {0.1, 0.1});
  EXPECT_EQ(t.tau, 2.5);
  EXPECT_EQ(violation_count(t, s), 0);
}

TEST(CalibrateFn, TenthsAtHalf) {
  const auto t = calibrate_fn(tenths(), {0.5, 0.5});
  EXPECT_EQ(t.k_star, 4);
  EXPECT_DOUBLE_EQ(t.tau, 0.5);
  EXPECT_EQ(t.direction, Direction::MissBelow);
  EXPECT_EQ(violation_count(t, tenths()), 4);
}

TEST(CalibrateFn, AllTied) {
  const std::vector<double> s(64, -1.0);
  const auto t = calibrate_fn(s, {0.05, 0.05});
  EXPECT_EQ(t.tau, -1.0);
  EXPECT_EQ(violation_count(t, s), 0);
}

TEST(CalibrateFn, FiftyNineScoresPickTheMinimum) {
  const auto s = distinct(59, 4);
  const auto t = calibrate_fn(s, {0.05, 0.05});
  EXPECT_EQ(t.tau, *std::min_element(s.begin(), s.end()));
}

TEST(Calibrate, TooFewSamples) {
  const auto s = distinct(58, 5);
  try {
    calibrate_fp(s, {0.05, 0.05});
    FAIL() << "expected InsufficientCalibration";
  } catch (const InsufficientCalibration& e) {
    EXPECT_EQ(e.side(), ScoreClass::Normal);
    EXPECT_EQ(e.have(), 58u);
    EXPECT_EQ(e.need(), 59u);
    EXPECT_NE(std::string(e.what()).find("need ≥ 59 normal samples"), std::string::npos);
  }
  EXPECT_THROW(calibrate_fn(s, {0.05, 0.05}), InsufficientCalibration);
  EXPECT_THROW(calibrate_fn(std::vector<double>{}, {0.05, 0.05}), InsufficientCalibration);
}

TEST(Calibrate, TrivialSentinels) {
  const auto s = distinct(10, 6);
  const auto fp = calibrate_fp(s, {0.05, 0.05}, {.allow_trivial = true});
  const auto fn = calibrate_fn(s, {0.05, 0.05}, {.allow_trivial = true});
  EXPECT_TRUE(fp.trivial);
  EXPECT_TRUE(fn.trivial);
  EXPECT_EQ(fp.tau, std::numeric_limits<double>::infinity());
  EXPECT_EQ(fn.tau, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(violation_count(fp, s), 0);
  EXPECT_EQ(violation_count(fn, s), 0);
}

TEST(Calibrate, RejectsNonFinite) {
  auto s = distinct(100, 7);
  s[42] = std::nan("");
  EXPECT_THROW(calibrate_fp(s, {0.1, 0.1}), NonFiniteScore);
  s[42] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(calibrate_fn(s, {0.1, 0.1}), NonFiniteScore);
}

TEST(Calibrate, LabeledSamplesMustMatchTheSide) {
  std::vector<ScoredSample> samples;
  for (double x : tenths()) samples.push_back({x, 0});
  EXPECT_EQ(calibrate_fp(samples, {0.5, 0.5}).tau, calibrate_fp(tenths(), {0.5, 0.5}).tau);
  EXPECT_THROW(calibrate_fn(samples, {0.5, 0.5}), Error);
  samples[3].label.reset();
  EXPECT_NO_THROW(calibrate_fp(samples, {0.5, 0.5}));
}

TEST(EmpiricalLoss, Examples) {
  PacThreshold fp;
  fp.direction = Direction::FlagAbove;
  fp.tau = 0.6;
  EXPECT_DOUBLE_EQ(empirical_loss(fp, std::vector<double>{0.7, 0.8, 0.9, 1.0, 0.5}), 0.8);

  PacThreshold fn;
  fn.direction = Direction::MissBelow;
  fn.tau = 0.5;
  EXPECT_DOUBLE_EQ(empirical_loss(fn, std::vector<double>(9, 0.5)), 0.0);

  fp.tau = std::numeric_limits<double>::infinity();
  EXPECT_DOUBLE_EQ(empirical_loss(fp, std::vector<double>{1e300, -3.0, 0.0}), 0.0);

  EXPECT_THROW(empirical_loss(fp, std::vector<double>{}), Error);
}

TEST(Calibrate, MatchesExhaustiveSearch) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> size(1, 50);
  std::uniform_real_distribution<double> param(0.02, 0.6);
  std::uniform_int_distribution<int> coarse(0, 6);
  std::normal_distribution<double> z;
  int feasible = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const int n = size(gen);
    std::vector<double> s(n);
    const bool ties = rep % 3 == 0;
    for (auto& x : s) x = ties ? coarse(gen) : z(gen);
    const PacParams p{param(gen), param(gen)};
    const auto k = oracle::k_star(n, p.eps, p.delta);
    if (!k) {
      EXPECT_THROW(calibrate_fp(s, p), InsufficientCalibration);
      EXPECT_THROW(calibrate_fn(s, p), InsufficientCalibration);
      continue;
    }
    ++feasible;
    EXPECT_EQ(calibrate_fp(s, p).tau, oracle::tau_fp(s, *k)) << "rep " << rep;
    EXPECT_EQ(calibrate_fn(s, p).tau, oracle::tau_fn(s, *k)) << "rep " << rep;
  }
  EXPECT_GT(feasible, 100);
}

TEST(Calibrate, CountNeverExceedsBudget) {
  std::mt19937_64 gen(12);
  std::uniform_int_distribution<int> coarse(0, 20);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> s(60 + rep * 7);
    for (auto& x : s) x = rep % 2 ? coarse(gen) : std::ldexp(coarse(gen) + 0.5, rep % 5);
    const PacParams p{0.05 + 0.002 * rep, 0.05};
    for (const auto& t : {calibrate_fp(s, p), calibrate_fn(s, p)}) {
      EXPECT_LE(empirical_loss(t, s) * static_cast<double>(s.size()), static_cast<double>(t.k_star) + 1e-9);
      EXPECT_EQ(violation_count(t, s), t.calib_violation_count);
    }
  }
}

TEST(Calibrate, LooserParamsNeverTighten) {
  const auto s = distinct(500, 13);
  double prev_fp = std::numeric_limits<double>::infinity();
  double prev_fn = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 100; ++i) {
    const PacParams p{i / 100.0, 0.05};
    const auto fp = calibrate_fp(s, p);
    const auto fn = calibrate_fn(s, p);
    EXPECT_LE(fp.tau, prev_fp);
    EXPECT_GE(fn.tau, prev_fn);
    prev_fp = fp.tau;
    prev_fn = fn.tau;
  }
  prev_fp = std::numeric_limits<double>::infinity();
  prev_fn = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 100; ++i) {
    const PacParams p{0.1, i / 100.0};
    const auto fp = calibrate_fp(s, p);
    const auto fn = calibrate_fn(s, p);
    EXPECT_LE(fp.tau, prev_fp);
    EXPECT_GE(fn.tau, prev_fn);
    prev_fp = fp.tau;
    prev_fn = fn.tau;
  }
}

TEST(Calibrate, OrderOfInputIsIrrelevant) {
  auto s = distinct(301, 14);
  const auto fp = calibrate_fp(s, {0.1, 0.05});
  const auto fn = calibrate_fn(s, {0.1, 0.05});
  std::mt19937_64 gen(15);
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(s.begin(), s.end(), gen);
    EXPECT_EQ(calibrate_fp(s, {0.1, 0.05}), fp);
    EXPECT_EQ(calibrate_fn(s, {0.1, 0.05}), fn);
  }
}

TEST(Calibrate, InputIsNotModified) {
  const auto s = distinct(200, 16);
  auto copy = s;
  calibrate_fp(copy, {0.1, 0.1});
  calibrate_fn(copy, {0.1, 0.1});
  EXPECT_EQ(copy, s);
}
