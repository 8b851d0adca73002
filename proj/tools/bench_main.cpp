// Command-line driver for the benchmark experiments. Reads a JSON config,
// runs the requested sampler grid and writes one CSV of metrics.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "liftmala/config.hpp"
#include "liftmala/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int run_command(const std::string& config_path, const std::string& output,
                int threads, const std::vector<std::string>& overrides) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read config file '" << config_path << "'\n";
    return kExitConfig;
  }
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    std::cerr << "error: '" << config_path << "' is not valid JSON\n";
    return kExitConfig;
  }

  try {
    doc = liftmala::apply_overrides(std::move(doc), overrides);
  } catch (const liftmala::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  liftmala::ValidationResult validated = liftmala::validate_config(doc);
  if (!validated.ok()) {
    std::cerr << "invalid config:\n";
    for (const std::string& msg : validated.errors)
      std::cerr << "  " << msg << "\n";
    return kExitConfig;
  }

  liftmala::ExperimentConfig cfg = *validated.config;
  if (!output.empty()) cfg.output_path = output;

  try {
    const std::vector<liftmala::CsvRow> rows =
        liftmala::run_experiment(cfg, threads, &std::cout);
    liftmala::write_csv(rows, cfg.output_path);
    std::cout << "wrote " << rows.size() << " rows to " << cfg.output_path
              << "\n";
  } catch (const liftmala::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted MCMC benchmark runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  int threads = 1;
  std::vector<std::string> overrides;

  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "JSON experiment config")
      ->required();
  run->add_option("--output", output, "CSV output path (overrides config)");
  run->add_option("--threads", threads, "worker threads for replicates")
      ->check(CLI::PositiveNumber);
  run->add_option("--override", overrides,
                  "key=value pairs merged over the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  return run_command(config_path, output, threads, overrides);
}
