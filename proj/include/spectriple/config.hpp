#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spectriple {

// A run configuration.  Text form: `[section]` headers followed by
// `key = value` lines; `#` starts a comment line.  Lists are comma
// separated.  Every key has a default, so an empty file is valid.
//
//   [space]         generator (interval_grid | cantor | random_cloud | file),
//                   m, level, points, dim, path, format (distance_matrix |
//                   point_cloud), header
//   [construction]  kind (st_d | st_delta), covering (auto | greedy |
//                   dyadic_interval | cantor), theta, rho, delta, n_min, n_max
//   [analysis]      metric, spectrum, sweep, sweep_min, sweep_max,
//                   points_per_octave, zeta, zeta_s, zeta_form (abs |
//                   resolvent | both), dixmier, dixmier_functions,
//                   dixmier_lambda, function_table, interval_example,
//                   interval_n_max
//   [output]        dir, format (csv | tsv), dump_triple
//   [run]           seed
struct RunConfig {
  struct Space {
    std::string generator = "interval_grid";
    std::int64_t m = 257;
    int level = 6;
    std::int64_t points = 50;
    std::int64_t dim = 2;
    std::string path;
    std::string format = "distance_matrix";
    bool header = false;
    bool operator==(const Space&) const = default;
  } space;
  struct Construction {
    std::string kind = "st_delta";
    std::string covering = "auto";
    double theta = 1.0;
    double rho = 0.5;
    double delta = 9.0;
    int n_min = 1;
    int n_max = 9;
    bool operator==(const Construction&) const = default;
  } construction;
  struct Analysis {
    bool metric = true;
    bool spectrum = true;
    bool sweep = false;
    double sweep_min = 1.0;
    double sweep_max = 1024.0;
    int points_per_octave = 16;
    bool zeta = false;
    std::vector<double> zeta_s{1.0, 1.5, 2.0};
    std::string zeta_form = "both";
    bool dixmier = false;
    std::vector<std::string> dixmier_functions{"const1", "linear", "square"};
    double dixmier_lambda = 256.0;
    std::string function_table;
    bool interval_example = false;
    int interval_n_max = 20;
    bool operator==(const Analysis&) const = default;
  } analysis;
  struct Output {
    std::string dir = "out";
    std::string format = "csv";
    bool dump_triple = false;
    bool operator==(const Output&) const = default;
  } output;
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError naming the offending `section.key` for unknown keys,
// malformed values and lines outside a section.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Sets one `section.key` from its text form.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

// Range checks; throws ConfigError with the field path.
void validate_config(const RunConfig& config);

// FNV-1a 64 of the canonical text without output.dir, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace spectriple
