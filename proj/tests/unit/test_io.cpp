#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "pacwrap/config.hpp"
#include "pacwrap/detector_io.hpp"
#include "pacwrap/errors.hpp"
#include "pacwrap/score_io.hpp"

using namespace pacwrap;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("pacwrap_io_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

ScoreFile parse(const std::string& text, ScoreFormat f = ScoreFormat::CSV) {
  std::istringstream in(text);
  return parse_scores(in, f, "mem");
}

std::size_t error_line(const std::string& text, ScoreFormat f = ScoreFormat::CSV) {
  try {
    parse(text, f);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::vector<double> awkward_values() {
  std::vector<double> v{0.1, 1.0 / 3.0, -0.0, 5e-324, 1.7976931348623157e308, -2.5e-17, 0.3 + 0.6};
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) v.push_back(u(gen) * std::ldexp(1.0, i % 40 - 20));
  return v;
}

PacThreshold threshold(double tau, Direction d, double eps, double delta) {
  PacThreshold t;
  t.tau = tau;
  t.direction = d;
  t.params = {eps, delta};
  t.k_star = 17;
  t.n_cal = 431;
  t.calib_violation_count = 16;
  return t;
}

}  // namespace

TEST(ScoreCsv, ParsesLabeledAndUnlabeled) {
  const auto f = parse("score,label\n0.5,1\n-2,0\n3.25,\n");
  ASSERT_EQ(f.records.size(), 3u);
  EXPECT_EQ(f.records[0], (ScoredSample{0.5, 1}));
  EXPECT_EQ(f.records[1], (ScoredSample{-2.0, 0}));
  EXPECT_EQ(f.records[2], (ScoredSample{3.25, std::nullopt}));

  const auto g = parse("score\n1\n2\n");
  ASSERT_EQ(g.records.size(), 2u);
  EXPECT_FALSE(g.records[1].label);
}

TEST(ScoreCsv, EmptyInput) {
  EXPECT_TRUE(parse("").records.empty());
  EXPECT_TRUE(parse("score,label\n").records.empty());
}

TEST(ScoreCsv, ErrorsNameTheLine) {
  EXPECT_EQ(error_line("score,label\n1,0\nnan,1\n"), 3u);
  EXPECT_EQ(error_line("score,label\n1,0\n2,0\ninf,1\n"), 4u);
  EXPECT_EQ(error_line("score,label\nabc,0\n"), 2u);
  EXPECT_EQ(error_line("score,label\n1,2\n"), 2u);
  EXPECT_EQ(error_line("score,label\n1,0,3\n"), 2u);
  EXPECT_EQ(error_line("value\n1\n"), 1u);
  try {
    parse("score,label\n0.1,0\nNaN,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("mem:3"), std::string::npos);
  }
}

TEST(ScoreJsonLines, ParsesAndRejects) {
  const auto f = parse("{\"score\": 1.5, \"label\": 1}\n\n{\"score\": -3}\n", ScoreFormat::JSONLines);
  ASSERT_EQ(f.records.size(), 2u);
  EXPECT_EQ(f.records[0], (ScoredSample{1.5, 1}));
  EXPECT_FALSE(f.records[1].label);
  EXPECT_EQ(error_line("{\"score\": 1}\n{\"score\": \"x\"}\n", ScoreFormat::JSONLines), 2u);
  EXPECT_EQ(error_line("{\"score\": 1}\n{bad\n", ScoreFormat::JSONLines), 2u);
  EXPECT_EQ(error_line("{\"score\": 1, \"label\": 3}\n", ScoreFormat::JSONLines), 1u);
  EXPECT_EQ(error_line("{\"score\": NaN}\n", ScoreFormat::JSONLines), 1u);
}

TEST(ScoreFiles, FormatFromExtension) {
  EXPECT_EQ(format_for_path("a.jsonl"), ScoreFormat::JSONLines);
  EXPECT_EQ(format_for_path("a.ndjson"), ScoreFormat::JSONLines);
  EXPECT_EQ(format_for_path("a.csv"), ScoreFormat::CSV);
  EXPECT_EQ(format_for_path("scores"), ScoreFormat::CSV);
}

TEST(ScoreFiles, RoundTripIsBitExact) {
  TempDir dir;
  std::vector<ScoredSample> records;
  int i = 0;
  for (double v : awkward_values()) {
    std::optional<int> label;
    if (i % 3) label = i % 2;
    records.push_back({v, label});
    ++i;
  }
  for (const char* name : {"s.csv", "s.jsonl"}) {
    write_score_file(dir / name, records);
    const auto back = read_score_file(dir / name).records;
    ASSERT_EQ(back.size(), records.size());
    for (std::size_t k = 0; k < records.size(); ++k) {
      EXPECT_EQ(std::signbit(back[k].score), std::signbit(records[k].score));
      EXPECT_EQ(back[k], records[k]) << name << " " << k;
    }
  }
}

TEST(ScoreFiles, MissingFile) { EXPECT_THROW(read_score_file("/nonexistent/x.csv"), ParseError); }

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(0.65), "0.65");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  for (double v : awkward_values()) EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
}

TEST(DetectorJson, RoundTripIsBitExact) {
  TempDir dir;
  std::vector<RelaxStep> trace{{0.05, 0.05, std::nullopt, std::nullopt},
                               {0.15, 0.15, 1.0 / 3.0, 0.1 + 0.2}};
  const WrappedDetector d(threshold(1.0 / 3.0, Direction::MissBelow, 0.15, 0.05),
                          threshold(0.1 + 0.2, Direction::FlagAbove, 0.15, 0.01), trace);
  const auto c = collapse_threshold(d, CollapseRule::custom(0.31415926535897931));
  for (const auto& det : {d, c}) {
    write_detector_file(dir / "d.json", det);
    EXPECT_EQ(read_detector_file(dir / "d.json"), det);
  }
}

TEST(DetectorJson, CarriesTheDocumentedFields) {
  const WrappedDetector d(threshold(0.7, Direction::MissBelow, 0.05, 0.05),
                          threshold(0.6, Direction::FlagAbove, 0.05, 0.05));
  const auto j = detector_to_json(collapse_threshold(d));
  for (const char* k : {"version", "tau_fn", "tau_fp", "k_star_fn", "k_star_fp", "n_fn", "n_fp",
                        "eps_fn", "eps_fp", "delta_fn", "delta_fp", "eps_ad", "delta_ad",
                        "final_tau", "relaxation_trace", "strictness_convention"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["strictness_convention"], "strict");
  EXPECT_EQ(j["version"], kDetectorSchemaVersion);
}

TEST(DetectorJson, TrivialThresholdsSurvive) {
  TempDir dir;
  auto fn = threshold(-std::numeric_limits<double>::infinity(), Direction::MissBelow, 0.05, 0.05);
  auto fp = threshold(std::numeric_limits<double>::infinity(), Direction::FlagAbove, 0.05, 0.05);
  fn.trivial = fp.trivial = true;
  const WrappedDetector d(fn, fp);
  write_detector_file(dir / "t.json", d);
  EXPECT_EQ(read_detector_file(dir / "t.json"), d);
}

TEST(DetectorJson, RejectsTamperedDocuments) {
  const WrappedDetector d(threshold(0.7, Direction::MissBelow, 0.05, 0.05),
                          threshold(0.6, Direction::FlagAbove, 0.05, 0.05));
  auto good = detector_to_json(d);
  EXPECT_NO_THROW(detector_from_json(good, "x"));

  auto j = good;
  j["version"] = 99;
  EXPECT_THROW(detector_from_json(j, "x"), ParseError);
  j = good;
  j["strictness_convention"] = "inclusive";
  EXPECT_THROW(detector_from_json(j, "x"), ParseError);
  j = good;
  j["delta_ad"] = 0.05;
  EXPECT_THROW(detector_from_json(j, "x"), ParseError);
  j = good;
  j["final_tau"] = 0.9;
  EXPECT_THROW(detector_from_json(j, "x"), ParseError);
  j = good;
  j.erase("tau_fn");
  EXPECT_THROW(detector_from_json(j, "x"), ParseError);
}

TEST(TomlSubset, ParsesKeysTablesAndComments) {
  const auto m = parse_toml_subset(
      "# header\n"
      "eps = 0.1\n"
      "seed = 7   # trailing\n"
      "\n"
      "[output]\n"
      "detector = \"out/d.json\"\n",
      "cfg");
  EXPECT_EQ(m.at("eps"), "0.1");
  EXPECT_EQ(m.at("seed"), "7");
  EXPECT_EQ(m.at("output.detector"), "out/d.json");
}

TEST(TomlSubset, ErrorsCarryLines) {
  try {
    parse_toml_subset("eps = 0.1\nthis is not toml\n", "cfg");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_toml_subset("a = 1\na = 2\n", "cfg"), ParseError);
  EXPECT_THROW(parse_toml_subset("s = \"open\n", "cfg"), ParseError);
}

TEST(RunConfig, AppliesValuesAndValidates) {
  RunConfig cfg;
  apply_config_values(cfg, parse_toml_subset("eps = 0.1\ndelta_fp = 0.01\ntrials = 50\n", "c"), "c");
  EXPECT_EQ(cfg.eps_fn, 0.1);
  EXPECT_EQ(cfg.eps_fp, 0.1);
  EXPECT_EQ(cfg.delta_fn, 0.05);
  EXPECT_EQ(cfg.delta_fp, 0.01);
  EXPECT_EQ(cfg.trials, 50);
  EXPECT_NO_THROW(cfg.validate());

  EXPECT_THROW(apply_config_values(cfg, {{"epz", "0.1"}}, "c"), ParseError);
  EXPECT_THROW(apply_config_values(cfg, {{"eps", "tiny"}}, "c"), ParseError);
  cfg.eps_fn = 1.0;
  EXPECT_THROW(cfg.validate(), std::domain_error);
}

TEST(RunConfig, SeedFromEnvironment) {
  RunConfig cfg;
  ::setenv(kSeedEnvVar, "1234", 1);
  apply_seed_env(cfg);
  EXPECT_EQ(cfg.seed, 1234u);
  ::setenv(kSeedEnvVar, "x", 1);
  EXPECT_THROW(apply_seed_env(cfg), ParseError);
  ::unsetenv(kSeedEnvVar);
  cfg.seed = 5;
  apply_seed_env(cfg);
  EXPECT_EQ(cfg.seed, 5u);
}
