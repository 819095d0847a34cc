#include "pacwrap/score_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "pacwrap/errors.hpp"

namespace pacwrap {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

double parse_score(std::string_view field, const std::string& source, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ParseError(source, line, "cannot parse score '" + std::string(field) + "'");
  if (!std::isfinite(v)) throw ParseError(source, line, "non-finite score '" + std::string(field) + "'");
  return v;
}

std::optional<int> parse_label(std::string_view field, const std::string& source,
                               std::size_t line) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw ParseError(source, line, "label must be 0, 1 or empty, got '" + std::string(field) + "'");
}

void parse_csv(std::istream& in, ScoreFile& file) {
  std::string raw;
  std::size_t line = 0;
  bool has_label_column = false;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty()) continue;
    if (!header_seen) {
      if (text == "score,label") {
        has_label_column = true;
      } else if (text != "score") {
        throw ParseError(file.source_tag, line, "expected header 'score,label'");
      }
      header_seen = true;
      continue;
    }
    const auto comma = text.find(',');
    if (!has_label_column && comma != std::string_view::npos)
      throw ParseError(file.source_tag, line, "unexpected extra column");
    if (comma != std::string_view::npos && text.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(file.source_tag, line, "expected 2 columns");
    ScoredSample s;
    s.score = parse_score(text.substr(0, comma), file.source_tag, line);
    if (comma != std::string_view::npos)
      s.label = parse_label(text.substr(comma + 1), file.source_tag, line);
    file.records.push_back(s);
  }
  if (!header_seen && !file.records.empty())
    throw ParseError(file.source_tag, 1, "missing header");
}

void parse_jsonl(std::istream& in, ScoreFile& file) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(file.source_tag, line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("score") || !j["score"].is_number())
      throw ParseError(file.source_tag, line, "expected an object with a numeric \"score\"");
    ScoredSample s;
    s.score = j["score"].get<double>();
    if (!std::isfinite(s.score)) throw ParseError(file.source_tag, line, "non-finite score");
    if (j.contains("label") && !j["label"].is_null()) {
      const auto& l = j["label"];
      if (!l.is_number_integer() || (l.get<int>() != 0 && l.get<int>() != 1))
        throw ParseError(file.source_tag, line, "label must be 0 or 1");
      s.label = l.get<int>();
    }
    file.records.push_back(s);
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

ScoreFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return ScoreFormat::JSONLines;
  return ScoreFormat::CSV;
}

ScoreFile parse_scores(std::istream& in, ScoreFormat format, const std::string& source_tag) {
  ScoreFile file;
  file.format = format;
  file.source_tag = source_tag;
  if (format == ScoreFormat::CSV)
    parse_csv(in, file);
  else
    parse_jsonl(in, file);
  return file;
}

ScoreFile read_score_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_scores(in, format_for_path(path), path.string());
}

void write_scores(std::ostream& out, const std::vector<ScoredSample>& records, ScoreFormat format) {
  if (format == ScoreFormat::CSV) {
    out << "score,label\n";
    for (const auto& r : records)
      out << format_double(r.score) << ',' << (r.label ? std::to_string(*r.label) : "") << '\n';
    return;
  }
  for (const auto& r : records) {
    // keep JSON readers on the floating-point path so -0 and huge integers survive
    auto v = format_double(r.score);
    if (v.find_first_of(".eE") == std::string::npos) v += ".0";
    out << "{\"score\":" << v;
    if (r.label) out << ",\"label\":" << *r.label;
    out << "}\n";
  }
}

void write_score_file(const std::filesystem::path& path, const std::vector<ScoredSample>& records) {
  std::ostringstream out;
  write_scores(out, records, format_for_path(path));
  write_file_atomic(path, out.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pacwrap
