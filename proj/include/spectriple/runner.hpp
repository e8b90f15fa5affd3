#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spectriple/config.hpp"
#include "spectriple/covering.hpp"
#include "spectriple/metric_space.hpp"
#include "spectriple/triple.hpp"

namespace spectriple {

enum class Command { build, metric, spectrum, sweep, zeta, dixmier, interval_example, report };

Command parse_command(const std::string& name);
std::string to_string(Command command);

struct RunResult {
  bool checks_passed = true;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> messages;  // one line per analysis

  // 0 when every enabled check passed, 1 otherwise.
  int exit_status() const { return checks_passed ? 0 : 1; }
};

FiniteMetricSpace make_space(const RunConfig& config);
CoveringStrategy choose_covering(const RunConfig& config, const FiniteMetricSpace& space);
SpectralTripleSum make_triple(const RunConfig& config, const FiniteMetricSpace& space);

// A single-analysis command runs that analysis only; `report` runs every
// analysis enabled in the config; `build` only writes the construction
// summary (and the triple dump when requested).  Validates the config first.
RunResult run(const RunConfig& config, Command command = Command::report);

}  // namespace spectriple
