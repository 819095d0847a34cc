#include "pacwrap/config.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "pacwrap/errors.hpp"
#include "pacwrap/score_io.hpp"

namespace pacwrap {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

double to_double(const std::string& key, const std::string& v, const std::string& source) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ParseError(source, 0, "key '" + key + "' expects a number, got '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v, const std::string& source) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ParseError(source, 0, "key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

}  // namespace

void RunConfig::validate() const {
  auto prob = [](const char* name, double v) {
    if (!(v > 0.0 && v < 1.0))
      throw std::domain_error(std::string(name) + " must lie in (0, 1), got " + format_double(v));
  };
  prob("eps_fn", eps_fn);
  prob("eps_fp", eps_fp);
  prob("delta_fn", delta_fn);
  prob("delta_fp", delta_fp);
  if (!(relax_step > 0.0 && relax_step <= 1.0))
    throw std::domain_error("relax_step must lie in (0, 1], got " + format_double(relax_step));
  if (trials < 1) throw std::domain_error("trials must be >= 1");
}

std::map<std::string, std::string> parse_toml_subset(const std::string& text,
                                                     const std::string& source) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string raw;
  std::string table;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ParseError(source, line, "malformed table header");
      table = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(source, line, "expected 'key = value'");
    const auto key = trim(s.substr(0, eq));
    auto value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(source, line, "empty key or value");
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        throw ParseError(source, line, "unterminated string");
      value = value.substr(1, value.size() - 2);
    }
    const auto full = table.empty() ? key : table + "." + key;
    if (out.contains(full)) throw ParseError(source, line, "duplicate key '" + full + "'");
    out[full] = value;
  }
  return out;
}

void apply_config_values(RunConfig& cfg, const std::map<std::string, std::string>& values,
                         const std::string& source) {
  for (const auto& [key, v] : values) {
    if (key == "eps") {
      cfg.eps_fn = cfg.eps_fp = to_double(key, v, source);
    } else if (key == "delta") {
      cfg.delta_fn = cfg.delta_fp = to_double(key, v, source);
    } else if (key == "eps_fn") {
      cfg.eps_fn = to_double(key, v, source);
    } else if (key == "eps_fp") {
      cfg.eps_fp = to_double(key, v, source);
    } else if (key == "delta_fn") {
      cfg.delta_fn = to_double(key, v, source);
    } else if (key == "delta_fp") {
      cfg.delta_fp = to_double(key, v, source);
    } else if (key == "relax_step") {
      cfg.relax_step = to_double(key, v, source);
    } else if (key == "trials") {
      cfg.trials = to_int<std::int64_t>(key, v, source);
    } else if (key == "seed") {
      cfg.seed = to_int<std::uint64_t>(key, v, source);
    } else if (key == "workers") {
      cfg.workers = to_int<unsigned>(key, v, source);
    } else if (key.starts_with("output.")) {
      cfg.outputs[key.substr(7)] = v;
    } else {
      throw ParseError(source, 0, "unknown config key '" + key + "'");
    }
  }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  apply_config_values(cfg, parse_toml_subset(text, path.string()), path.string());
}

void apply_seed_env(RunConfig& cfg) {
  const char* v = std::getenv(kSeedEnvVar);
  if (!v || !*v) return;
  cfg.seed = to_int<std::uint64_t>("seed", v, kSeedEnvVar);
}

}  // namespace pacwrap
