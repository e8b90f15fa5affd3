#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spectriple/config.hpp"
#include "spectriple/errors.hpp"
#include "spectriple/runner.hpp"
#include "spectriple/test_functions.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::string> seed;
  bool dump_triple = false;
  std::string format;
  std::vector<std::string> sets;
  bool json = false;
};

void add_run_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "Configuration file");
  cmd->add_option("--out", opt.out_dir, "Output directory");
  cmd->add_option("--seed", opt.seed, "Seed for random point clouds");
  cmd->add_flag("--dump-triple", opt.dump_triple, "Write every module to triple.tsv");
  cmd->add_option("--format", opt.format, "Table format")->check(CLI::IsMember({"csv", "tsv"}));
  cmd->add_option("--set", opt.sets, "Override a config value, section.key=value");
  cmd->add_flag("--json", opt.json, "Print the run summary as JSON");
}

spectriple::RunConfig resolve(const Options& opt) {
  spectriple::RunConfig config;
  if (!opt.config_path.empty()) config = spectriple::load_config(opt.config_path);
  for (const auto& s : opt.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw spectriple::ConfigError(s, "expected section.key=value");
    spectriple::set_config_value(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!opt.out_dir.empty()) config.output.dir = opt.out_dir;
  if (opt.seed) spectriple::set_config_value(config, "run.seed", *opt.seed);
  if (opt.dump_triple) config.output.dump_triple = true;
  if (!opt.format.empty()) config.output.format = opt.format;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral triples from two-point modules on finite metric spaces"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"build", "Build the triple and write its summary"},
      {"metric", "Induced metric report"},
      {"spectrum", "Spectrum of |D| with multiplicities"},
      {"sweep", "Eigenvalue counting sweep"},
      {"zeta", "Zeta traces and summability tail ratios"},
      {"dixmier", "Weighted traces and log-limit estimates"},
      {"interval-example", "Unit-interval ST(9) report"},
      {"report", "Run every analysis enabled in the config"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_run_options(cmd, opt);
    subs.push_back(cmd);
  }
  auto* functions = app.add_subcommand("functions", "List the test functions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (functions->parsed()) {
      for (const auto& name : spectriple::list_functions()) {
        if (name == "user-table") {
          std::cout << name << "\tpiecewise linear from an (x, f(x)) CSV covering [0,1]\n";
        } else {
          std::cout << name << '\t' << spectriple::make_function(name).definition << '\n';
        }
      }
      return 0;
    }
    for (auto* cmd : subs) {
      if (!cmd->parsed()) continue;
      const auto command = spectriple::parse_command(cmd->get_name());
      const auto config = resolve(opt);
      const auto result = spectriple::run(config, command);
      if (opt.json) {
        nlohmann::json j;
        j["command"] = cmd->get_name();
        j["config_hash"] = spectriple::config_hash(config);
        j["passed"] = result.checks_passed;
        j["messages"] = result.messages;
        std::vector<std::string> files;
        for (const auto& f : result.files) files.push_back(f.string());
        j["files"] = files;
        std::cout << j.dump(2) << '\n';
      } else {
        for (const auto& m : result.messages) std::cout << m << '\n';
        std::cout << (result.checks_passed ? "all checks passed" : "check violations found") << '\n';
      }
      return result.exit_status();
    }
  } catch (const spectriple::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
