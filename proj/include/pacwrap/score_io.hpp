#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pacwrap/types.hpp"

namespace pacwrap {

// Score files are the only boundary between a detector and this toolkit.
//
//   CSV:        header "score,label", label is 0, 1 or empty.
//   JSONLines:  {"score": <number>, "label": 0|1} per line, label optional.
//
// Non-finite scores are rejected with the offending line number.
enum class ScoreFormat { CSV, JSONLines };

struct ScoreFile {
  ScoreFormat format = ScoreFormat::CSV;
  std::vector<ScoredSample> records;
  std::string source_tag;
};

// .jsonl / .ndjson / .json select JSONLines, anything else CSV.
ScoreFormat format_for_path(const std::filesystem::path& path);

ScoreFile parse_scores(std::istream& in, ScoreFormat format, const std::string& source_tag);
ScoreFile read_score_file(const std::filesystem::path& path);

void write_scores(std::ostream& out, const std::vector<ScoredSample>& records, ScoreFormat format);
void write_score_file(const std::filesystem::path& path, const std::vector<ScoredSample>& records);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace pacwrap
