#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "hwave/config.hpp"
#include "hwave/errors.hpp"
#include "hwave/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral simulator and verification suite for the fractional damped wave equation "
               "on the Heisenberg group"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 20240917;
  for (const char* name : {"roundtrip", "simulate-linear", "fit-decay", "verify", "simulate-nonlinear",
                           "simulate-coupled"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "seed for sampled checks")->capture_default_str();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hwave::kExitConfig;
  }

  const hwave::Experiment experiment = hwave::experiment_from_name(app.get_subcommands().front()->get_name());
  hwave::RunConfig config;
  try {
    config = hwave::parse_config(config_path, &experiment);
  } catch (const hwave::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return hwave::kExitConfig;
  }
  try {
    const int code = hwave::run(config, out_dir, seed, std::cerr);
    std::cerr << hwave::experiment_name(experiment) << ": "
              << (code == hwave::kExitPass ? "pass" : code == hwave::kExitFail ? "FAIL" : "configuration error")
              << '\n';
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hwave::kExitFail;
  }
}
