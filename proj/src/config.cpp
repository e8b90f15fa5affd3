#include "spectriple/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "spectriple/errors.hpp"
#include "spectriple/io.hpp"
#include "spectriple/test_functions.hpp"

namespace spectriple {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

double to_real(const std::string& key, const std::string& v) {
  try {
    return parse_real(v, key);
  } catch (const Error&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    return parse_integer(v, key);
  } catch (const Error&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < -1000000 || x > 1000000) throw ConfigError(key, "integer out of range");
  return static_cast<int>(x);
}

std::string real_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Shortest form that round-trips.
  for (int p = 1; p <= 17; ++p) {
    char tmp[32];
    std::snprintf(tmp, sizeof tmp, "%.*g", p, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt(xs[i]);
  }
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Ordered as in the canonical text.
const std::vector<std::pair<std::string, Field>>& fields() {
  using C = RunConfig;
  using S = const std::string&;
  static const std::vector<std::pair<std::string, Field>> table = {
      {"space.generator", {[](C& c, S, S v) { c.space.generator = v; },
                           [](const C& c) { return c.space.generator; }}},
      {"space.m", {[](C& c, S k, S v) { c.space.m = to_integer(k, v); },
                   [](const C& c) { return std::to_string(c.space.m); }}},
      {"space.level", {[](C& c, S k, S v) { c.space.level = to_int(k, v); },
                       [](const C& c) { return std::to_string(c.space.level); }}},
      {"space.points", {[](C& c, S k, S v) { c.space.points = to_integer(k, v); },
                        [](const C& c) { return std::to_string(c.space.points); }}},
      {"space.dim", {[](C& c, S k, S v) { c.space.dim = to_integer(k, v); },
                     [](const C& c) { return std::to_string(c.space.dim); }}},
      {"space.path", {[](C& c, S, S v) { c.space.path = v; },
                      [](const C& c) { return c.space.path; }}},
      {"space.format", {[](C& c, S, S v) { c.space.format = v; },
                        [](const C& c) { return c.space.format; }}},
      {"space.header", {[](C& c, S k, S v) { c.space.header = to_bool(k, v); },
                        [](const C& c) { return bool_text(c.space.header); }}},
      {"construction.kind", {[](C& c, S, S v) { c.construction.kind = v; },
                             [](const C& c) { return c.construction.kind; }}},
      {"construction.covering", {[](C& c, S, S v) { c.construction.covering = v; },
                                 [](const C& c) { return c.construction.covering; }}},
      {"construction.theta", {[](C& c, S k, S v) { c.construction.theta = to_real(k, v); },
                              [](const C& c) { return real_text(c.construction.theta); }}},
      {"construction.rho", {[](C& c, S k, S v) { c.construction.rho = to_real(k, v); },
                            [](const C& c) { return real_text(c.construction.rho); }}},
      {"construction.delta", {[](C& c, S k, S v) { c.construction.delta = to_real(k, v); },
                              [](const C& c) { return real_text(c.construction.delta); }}},
      {"construction.n_min", {[](C& c, S k, S v) { c.construction.n_min = to_int(k, v); },
                              [](const C& c) { return std::to_string(c.construction.n_min); }}},
      {"construction.n_max", {[](C& c, S k, S v) { c.construction.n_max = to_int(k, v); },
                              [](const C& c) { return std::to_string(c.construction.n_max); }}},
      {"analysis.metric", {[](C& c, S k, S v) { c.analysis.metric = to_bool(k, v); },
                           [](const C& c) { return bool_text(c.analysis.metric); }}},
      {"analysis.spectrum", {[](C& c, S k, S v) { c.analysis.spectrum = to_bool(k, v); },
                             [](const C& c) { return bool_text(c.analysis.spectrum); }}},
      {"analysis.sweep", {[](C& c, S k, S v) { c.analysis.sweep = to_bool(k, v); },
                          [](const C& c) { return bool_text(c.analysis.sweep); }}},
      {"analysis.sweep_min", {[](C& c, S k, S v) { c.analysis.sweep_min = to_real(k, v); },
                              [](const C& c) { return real_text(c.analysis.sweep_min); }}},
      {"analysis.sweep_max", {[](C& c, S k, S v) { c.analysis.sweep_max = to_real(k, v); },
                              [](const C& c) { return real_text(c.analysis.sweep_max); }}},
      {"analysis.points_per_octave",
       {[](C& c, S k, S v) { c.analysis.points_per_octave = to_int(k, v); },
        [](const C& c) { return std::to_string(c.analysis.points_per_octave); }}},
      {"analysis.zeta", {[](C& c, S k, S v) { c.analysis.zeta = to_bool(k, v); },
                         [](const C& c) { return bool_text(c.analysis.zeta); }}},
      {"analysis.zeta_s",
       {[](C& c, S k, S v) {
          c.analysis.zeta_s.clear();
          for (const auto& s : split_list(v)) c.analysis.zeta_s.push_back(to_real(k, s));
        },
        [](const C& c) { return join(c.analysis.zeta_s, real_text); }}},
      {"analysis.zeta_form", {[](C& c, S, S v) { c.analysis.zeta_form = v; },
                              [](const C& c) { return c.analysis.zeta_form; }}},
      {"analysis.dixmier", {[](C& c, S k, S v) { c.analysis.dixmier = to_bool(k, v); },
                            [](const C& c) { return bool_text(c.analysis.dixmier); }}},
      {"analysis.dixmier_functions",
       {[](C& c, S, S v) { c.analysis.dixmier_functions = split_list(v); },
        [](const C& c) {
          return join(c.analysis.dixmier_functions, [](const std::string& s) { return s; });
        }}},
      {"analysis.dixmier_lambda",
       {[](C& c, S k, S v) { c.analysis.dixmier_lambda = to_real(k, v); },
        [](const C& c) { return real_text(c.analysis.dixmier_lambda); }}},
      {"analysis.function_table", {[](C& c, S, S v) { c.analysis.function_table = v; },
                                   [](const C& c) { return c.analysis.function_table; }}},
      {"analysis.interval_example",
       {[](C& c, S k, S v) { c.analysis.interval_example = to_bool(k, v); },
        [](const C& c) { return bool_text(c.analysis.interval_example); }}},
      {"analysis.interval_n_max",
       {[](C& c, S k, S v) { c.analysis.interval_n_max = to_int(k, v); },
        [](const C& c) { return std::to_string(c.analysis.interval_n_max); }}},
      {"output.dir", {[](C& c, S, S v) { c.output.dir = v; },
                      [](const C& c) { return c.output.dir; }}},
      {"output.format", {[](C& c, S, S v) { c.output.format = v; },
                         [](const C& c) { return c.output.format; }}},
      {"output.dump_triple", {[](C& c, S k, S v) { c.output.dump_triple = to_bool(k, v); },
                              [](const C& c) { return bool_text(c.output.dump_triple); }}},
      {"run.seed",
       {[](C& c, S k, S v) {
          if (!v.empty() && v[0] == '-') throw ConfigError(k, "seed must be >= 0");
          std::uint64_t x = 0;
          const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
          if (ec != std::errc() || end != v.data() + v.size()) {
            throw ConfigError(k, "expected an integer in [0, 2^64), got '" + v + "'");
          }
          c.seed = x;
        },
        [](const C& c) { return std::to_string(c.seed); }}},
  };
  return table;
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

void require_one_of(const std::string& value, std::initializer_list<const char*> options,
                    const std::string& field) {
  for (const char* o : options)
    if (value == o) return;
  std::string list;
  for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
  throw ConfigError(field, "'" + value + "' is not one of " + list);
}

}  // namespace

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(config, key, trim(value));
      return;
    }
  }
  throw ConfigError(key, "unknown key");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no), "bad section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"space", "construction", "analysis", "output", "run"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
        throw ConfigError(section, "unknown section");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (section.empty()) throw ConfigError(key, "key outside a section");
    set_config_value(config, section + "." + key, line.substr(eq + 1));
  }
  return config;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string serialize_config(const RunConfig& config) {
  std::string out, section;
  for (const auto& [name, field] : fields()) {
    const auto dot = name.find('.');
    const std::string sec = name.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += name.substr(dot + 1) + " = " + field.get(config) + "\n";
  }
  return out;
}

void validate_config(const RunConfig& c) {
  require_one_of(c.space.generator, {"interval_grid", "cantor", "random_cloud", "file"},
                 "space.generator");
  require(c.space.m >= 2, "space.m", "must be >= 2");
  require(c.space.level >= 0 && c.space.level <= 15, "space.level", "must be in [0, 15]");
  require(c.space.points >= 1, "space.points", "must be >= 1");
  require(c.space.dim >= 1, "space.dim", "must be >= 1");
  require_one_of(c.space.format, {"distance_matrix", "point_cloud"}, "space.format");
  require(c.space.generator != "file" || !c.space.path.empty(), "space.path",
          "required when generator = file");

  require_one_of(c.construction.kind, {"st_d", "st_delta"}, "construction.kind");
  require_one_of(c.construction.covering, {"auto", "greedy", "dyadic_interval", "cantor"},
                 "construction.covering");
  require(c.construction.theta > 0.0 && std::isfinite(c.construction.theta),
          "construction.theta", "must be > 0");
  require(c.construction.rho > 0.0 && c.construction.rho < 1.0, "construction.rho",
          "must be in (0, 1)");
  require(c.construction.delta > 0.0 && std::isfinite(c.construction.delta),
          "construction.delta", "must be > 0");
  require(c.construction.n_min >= 1, "construction.n_min", "must be >= 1");
  require(c.construction.n_max >= 1 && c.construction.n_max <= 60, "construction.n_max",
          "must be in [1, 60]");

  require(c.analysis.sweep_min > 0.0, "analysis.sweep_min", "must be > 0");
  require(c.analysis.sweep_max > c.analysis.sweep_min, "analysis.sweep_max",
          "must exceed analysis.sweep_min");
  require(c.analysis.points_per_octave >= 8, "analysis.points_per_octave", "must be >= 8");
  require(!c.analysis.zeta || !c.analysis.zeta_s.empty(), "analysis.zeta_s", "must not be empty");
  for (double s : c.analysis.zeta_s) require(s > 0.0, "analysis.zeta_s", "values must be > 0");
  require_one_of(c.analysis.zeta_form, {"abs", "resolvent", "both"}, "analysis.zeta_form");
  const auto names = list_functions();
  for (const auto& f : c.analysis.dixmier_functions) {
    require(std::find(names.begin(), names.end(), f) != names.end(), "analysis.dixmier_functions",
            "unknown function '" + f + "'");
    require(f != "user-table" || !c.analysis.function_table.empty(), "analysis.function_table",
            "required by user-table");
  }
  require(c.analysis.dixmier_lambda > 1.0, "analysis.dixmier_lambda", "must be > 1");
  require(c.analysis.interval_n_max >= 6 && c.analysis.interval_n_max <= 30,
          "analysis.interval_n_max", "must be in [6, 30]");

  require(!c.output.dir.empty(), "output.dir", "must not be empty");
  require_one_of(c.output.format, {"csv", "tsv"}, "output.format");
}

std::string config_hash(const RunConfig& config) {
  // The output directory does not affect results.
  RunConfig c = config;
  c.output.dir.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spectriple
