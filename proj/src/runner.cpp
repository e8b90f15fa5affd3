#include "spectriple/runner.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>

#include "spectriple/connes_metric.hpp"
#include "spectriple/errors.hpp"
#include "spectriple/interval_example.hpp"
#include "spectriple/io.hpp"
#include "spectriple/spectrum.hpp"
#include "spectriple/test_functions.hpp"

namespace spectriple {
namespace {

// Prefixes library errors with the module that raised them.
template <typename F>
auto in_module(const char* module, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(module) + ": " + e.what());
  }
}

class Writer {
 public:
  Writer(const RunConfig& config, Command command, RunResult& result)
      : dir_(config.output.dir),
        sep_(config.output.format == "tsv" ? '\t' : ','),
        ext_(config.output.format == "tsv" ? ".tsv" : ".csv"),
        header_{"config_hash " + config_hash(config), "command " + to_string(command)},
        result_(result) {}

  char sep() const { return sep_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& stem, const std::function<void(std::ostream&)>& body,
             const char* ext = nullptr) {
    std::filesystem::create_directories(dir_);
    const auto path = dir_ / (stem + (ext ? ext : ext_));
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::invalid_argument, "cannot write " + path.string());
    for (const auto& line : header_) out << "# " << line << '\n';
    body(out);
    result_.files.push_back(path);
  }

 private:
  std::filesystem::path dir_;
  char sep_;
  const char* ext_;
  std::vector<std::string> header_;
  RunResult& result_;
};

TestFunction function_for(const RunConfig& config, const std::string& name) {
  return make_function(name, config.analysis.function_table);
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "build") return Command::build;
  if (name == "metric") return Command::metric;
  if (name == "spectrum") return Command::spectrum;
  if (name == "sweep") return Command::sweep;
  if (name == "zeta") return Command::zeta;
  if (name == "dixmier") return Command::dixmier;
  if (name == "interval-example") return Command::interval_example;
  if (name == "report") return Command::report;
  throw Error(ErrorKind::invalid_argument, "unknown command '" + name + "'");
}

std::string to_string(Command command) {
  switch (command) {
    case Command::build: return "build";
    case Command::metric: return "metric";
    case Command::spectrum: return "spectrum";
    case Command::sweep: return "sweep";
    case Command::zeta: return "zeta";
    case Command::dixmier: return "dixmier";
    case Command::interval_example: return "interval-example";
    case Command::report: return "report";
  }
  return "unknown";
}

FiniteMetricSpace make_space(const RunConfig& config) {
  return in_module("metric_core", [&] {
    const auto& s = config.space;
    if (s.generator == "interval_grid") return build_interval_grid(s.m);
    if (s.generator == "cantor") return build_cantor(s.level);
    if (s.generator == "random_cloud") {
      return build_random_cloud(static_cast<std::size_t>(s.points), static_cast<std::size_t>(s.dim),
                                config.seed);
    }
    return load_space(s.path, *parse_space_format(s.format), s.header);
  });
}

CoveringStrategy choose_covering(const RunConfig& config, const FiniteMetricSpace& space) {
  const auto& c = config.construction;
  if (c.covering == "greedy") return CoveringStrategy::greedy;
  if (c.covering == "dyadic_interval") return CoveringStrategy::dyadic_interval;
  if (c.covering == "cantor") return CoveringStrategy::cantor;
  if (space.structure() == SpaceStructure::interval_grid && space.is_dyadic() && c.theta == 1.0 &&
      c.rho == 0.5) {
    return CoveringStrategy::dyadic_interval;
  }
  if (space.structure() == SpaceStructure::cantor) return CoveringStrategy::cantor;
  return CoveringStrategy::greedy;
}

SpectralTripleSum make_triple(const RunConfig& config, const FiniteMetricSpace& space) {
  return in_module("triple_builder", [&] {
    const auto& c = config.construction;
    if (c.kind == "st_d") return build_st_d(space);
    const auto chain = in_module("metric_core", [&] {
      return covering_chain(space, c.theta, c.rho, c.n_max + 1, choose_covering(config, space));
    });
    return build_st_delta(space, chain, c.delta, c.n_min, c.n_max);
  });
}

RunResult run(const RunConfig& config, Command command) {
  validate_config(config);
  RunResult result;
  Writer writer(config, command, result);
  const char sep = writer.sep();
  const auto& a = config.analysis;
  auto enabled = [&](Command c, bool flag) {
    return command == c || (command == Command::report && flag);
  };

  const bool needs_triple = command != Command::interval_example &&
                            (command != Command::report || a.metric || a.spectrum || a.sweep ||
                             a.zeta || a.dixmier || config.output.dump_triple);
  if (needs_triple) {
    const auto space = make_space(config);
    const auto triple = make_triple(config, space);
    const bool is_delta = triple.kind() == TripleKind::st_delta;

    writer.write("build", [&](std::ostream& out) {
      out << "quantity" << sep << "value\n";
      out << "space" << sep << space.label() << '\n';
      out << "points" << sep << space.size() << '\n';
      out << "kind" << sep << (is_delta ? "st_delta" : "st_d") << '\n';
      out << "modules" << sep << triple.modules().size() << '\n';
      out << "support" << sep << triple.support().size() << '\n';
      if (is_delta) {
        const auto& p = *triple.params();
        out << "theta" << sep << format_real(p.theta) << '\n';
        out << "rho" << sep << format_real(p.rho) << '\n';
        out << "delta" << sep << format_real(p.delta) << '\n';
        out << "k0" << sep << p.k0 << '\n';
        out << "l" << sep << p.l << '\n';
        out << "n_min" << sep << p.n_min << '\n';
        out << "n_max" << sep << p.n_max << '\n';
      }
    });
    result.messages.push_back("build: " + std::to_string(triple.modules().size()) + " modules on " +
                              std::to_string(space.size()) + " points");
    if (config.output.dump_triple) {
      writer.write("triple", [&](std::ostream& out) { dump_triple(triple, out); }, ".tsv");
    }

    if (enabled(Command::metric, a.metric)) {
      const auto check = is_delta ? MetricCheck::sandwich(triple.params()->delta) : MetricCheck::exact();
      const auto report = in_module("connes_metric", [&] { return metric_report(triple, check); });
      writer.write("metric", [&](std::ostream& out) { write_metric_csv(report, space, out, sep); });
      const bool ok = report.violations.empty();
      result.checks_passed &= ok;
      result.messages.push_back("metric: " + std::to_string(report.violations.size()) +
                                " violations, ratio in [" + format_real(report.min_ratio) + ", " +
                                format_real(report.max_ratio) + "]");
    }

    std::optional<SpectrumHistogram> spec;
    auto get_spec = [&]() -> const SpectrumHistogram& {
      if (!spec) spec = in_module("spectral_analysis", [&] { return spectrum(triple); });
      return *spec;
    };
    if (enabled(Command::spectrum, a.spectrum)) {
      writer.write("spectrum", [&](std::ostream& out) { write_spectrum_csv(get_spec(), out, sep); });
      result.messages.push_back("spectrum: " + std::to_string(get_spec().entries().size()) +
                                " distinct |D| eigenvalues, dimension " +
                                std::to_string(get_spec().total_multiplicity()));
    }
    if (enabled(Command::sweep, a.sweep)) {
      const auto sweep = in_module("spectral_analysis", [&] {
        return counting_sweep(get_spec(), a.sweep_min, a.sweep_max, a.points_per_octave);
      });
      writer.write("sweep", [&](std::ostream& out) { write_sweep_csv(sweep, out, sep); });
      result.messages.push_back("sweep: N/Lambda in [" + format_real(sweep.min_ratio) + ", " +
                                format_real(sweep.max_ratio) + "]");
    }
    if (enabled(Command::zeta, a.zeta)) {
      std::vector<double> tails(a.zeta_s.size(), std::nan(""));
      if (is_delta && triple.levels().size() >= 4) {
        const auto probes = in_module("spectral_analysis", [&] { return summability_probe(triple, a.zeta_s); });
        for (std::size_t i = 0; i < probes.size(); ++i) tails[i] = probes[i].tail_ratio;
      }
      writer.write("zeta", [&](std::ostream& out) {
        out << "s" << sep << "form" << sep << "value" << sep << "tail_ratio\n";
        for (std::size_t i = 0; i < a.zeta_s.size(); ++i) {
          const double s = a.zeta_s[i];
          const std::string tail = std::isnan(tails[i]) ? "" : format_real(tails[i]);
          for (const auto form : {ZetaForm::abs, ZetaForm::resolvent}) {
            const bool is_abs = form == ZetaForm::abs;
            if (a.zeta_form != "both" && a.zeta_form != (is_abs ? "abs" : "resolvent")) continue;
            const double v = in_module("spectral_analysis", [&] { return zeta(get_spec(), s, form); });
            out << format_real(s) << sep << (is_abs ? "abs" : "resolvent") << sep << format_real(v)
                << sep << tail << '\n';
          }
        }
      });
      result.messages.push_back("zeta: " + std::to_string(a.zeta_s.size()) + " exponents");
    }
    if (enabled(Command::dixmier, a.dixmier)) {
      writer.write("dixmier", [&](std::ostream& out) {
        out << "function" << sep << "lambda" << sep << "trace" << sep << "estimate\n";
        for (const auto& name : a.dixmier_functions) {
          const auto fn = function_for(config, name);
          std::vector<double> values(space.size());
          for (std::size_t i = 0; i < space.size(); ++i) {
            values[i] = space.has_coordinates() ? fn.eval(space.coordinates(i)[0]) : fn.eval(0.0);
          }
          const double trace = in_module("spectral_analysis", [&] {
            return weighted_trace(triple, values, a.dixmier_lambda);
          });
          out << name << sep << format_real(a.dixmier_lambda) << sep << format_real(trace) << sep
              << format_real(trace / std::log(a.dixmier_lambda)) << '\n';
        }
      });
      result.messages.push_back("dixmier: " + std::to_string(a.dixmier_functions.size()) +
                                " functions");
    }
  }

  if (enabled(Command::interval_example, a.interval_example)) {
    interval::ExampleOptions opt;
    opt.n_max = a.interval_n_max;
    opt.points_per_octave = a.points_per_octave;
    for (const auto& name : a.dixmier_functions) opt.functions.push_back(function_for(config, name));
    const auto rep = in_module("interval_example", [&] { return interval::example_report(opt); });
    const auto dir = writer.dir() / "interval_example";
    interval::write_example_report(rep, dir, sep, writer.header());
    for (const char* f : {"item_a.csv", "item_b.csv", "item_c.csv", "item_d.csv", "item_e.txt",
                          "multiplicities.csv", "summary.csv"}) {
      result.files.push_back(dir / f);
    }
    result.checks_passed &= rep.pass();
    result.messages.push_back(std::string("interval-example: ") + (rep.pass() ? "pass" : "fail"));
  }
  return result;
}

}  // namespace spectriple
