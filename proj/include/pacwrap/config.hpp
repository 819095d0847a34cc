#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "pacwrap/types.hpp"

namespace pacwrap {

// Settings shared by every subcommand. Defaults: eps = delta = 0.05 on both
// sides, relaxation step 0.1, 4000 Monte Carlo trials, seed 0.
struct RunConfig {
  double eps_fn = 0.05;
  double eps_fp = 0.05;
  double delta_fn = 0.05;
  double delta_fp = 0.05;
  double relax_step = 0.1;
  std::int64_t trials = 4000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::map<std::string, std::string> outputs;  // e.g. "detector" -> path

  PacParams params_fn() const { return {eps_fn, delta_fn}; }
  PacParams params_fp() const { return {eps_fp, delta_fp}; }

  // Throws std::domain_error unless every probability is in (0, 1) and the
  // step in (0, 1].
  void validate() const;
};

// Flat key/value subset of TOML: `key = value` lines, `#` comments, quoted or
// bare strings, integers, floats and booleans. `[table]` headers prefix the
// following keys with "table.". Throws ParseError with line numbers.
std::map<std::string, std::string> parse_toml_subset(const std::string& text,
                                                     const std::string& source);

// Applies recognised keys (eps_fn, eps_fp, delta_fn, delta_fp, eps, delta,
// relax_step, trials, seed, workers, output.*) onto cfg. Unknown keys throw
// ParseError so typos do not pass silently.
void apply_config_values(RunConfig& cfg, const std::map<std::string, std::string>& values,
                         const std::string& source);

void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

// Environment variable consulted for the default seed only.
inline constexpr const char* kSeedEnvVar = "PACWRAP_SEED";

// Replaces cfg.seed with $PACWRAP_SEED when set. Throws ParseError if the
// value is not an unsigned integer.
void apply_seed_env(RunConfig& cfg);

}  // namespace pacwrap
