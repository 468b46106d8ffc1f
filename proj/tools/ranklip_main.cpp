#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ranklip/experiments.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitCheckFailed = 1;

std::string read_file(const std::string& path) {
  std::ifstream input(path);
  if (!input) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << input.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"listwise ranking toolkit: constant certification, constrained training, "
               "and generalization-bound experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_path;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_given = false;

  const struct {
    const char* name;
    const char* description;
  } experiments[] = {
      {"certify", "certify the loss constants and norm identities"},
      {"train", "projected online / batch training runs"},
      {"bounds", "evaluate every bound formula with its term breakdown"},
      {"gap", "generalization-gap measurements against the bounds"},
      {"rates", "rate-interpolation slopes in optimistic and pessimistic regimes"},
      {"compare-cw", "complexity-term comparison against the l2-Lipschitz baseline"},
      {"rademacher-mc", "Monte Carlo Rademacher estimates against the closed forms"},
  };

  for (const auto& experiment : experiments) {
    auto* sub = app.add_subcommand(experiment.name, experiment.description);
    sub->add_option("--config", config_path, "config file (JSON or key=value lines)");
    sub->add_option("--out", output_path, "output path (default: stdout)");
    sub->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_given = true;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }

  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    ranklip::ExperimentConfig config = ranklip::default_experiment_config(experiment);
    if (!config_path.empty()) {
      ranklip::ExperimentConfig file_config =
          ranklip::parse_experiment_config(read_file(config_path));
      if (!file_config.experiment.empty() && file_config.experiment != experiment) {
        throw std::invalid_argument("experiment: config file says '" + file_config.experiment +
                                    "' but the subcommand is '" + experiment + "'");
      }
      file_config.experiment = experiment;
      config = file_config;
    }
    if (seed_given) config.seed = seed;
    if (!output_path.empty()) config.output_path = output_path;
    if (!format.empty())
      config.format = format == "csv" ? ranklip::OutputFormat::Csv : ranklip::OutputFormat::Json;

    return ranklip::run_experiment(config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "ranklip: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "ranklip: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}
