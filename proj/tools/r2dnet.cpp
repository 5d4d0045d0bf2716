#include <iostream>

#include <CLI11.hpp>

#include "r2dnet/cli.hpp"

namespace cli = r2dnet::cli;

namespace {

int exit_code_for(const r2dnet::Error& e) {
  switch (e.kind()) {
    case r2dnet::ErrorKind::QNotNegative:
    case r2dnet::ErrorKind::NonFiniteState:
    case r2dnet::ErrorKind::InfeasibleEverywhere:
      return cli::kConditionFailed;
    default:
      return cli::kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled-data and networked control of 2-D Roesser models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool dump = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (key = value)")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_flag("--dump-config", dump, "Print the parsed configuration and exit");
  };

  auto* discretize = app.add_subcommand("discretize", "Write the sampled model to discrete_model.csv");
  common(discretize);

  std::string h1_range, h2_range;
  auto* sweep = app.add_subcommand("sweep-rho", "Largest rho over a grid of sampling periods (fig4.csv)");
  common(sweep);
  sweep->add_option("--h1-range", h1_range, "a:b:n");
  sweep->add_option("--h2-range", h2_range, "a:b:n");

  std::string mode = "closed-triggered";
  auto* simulate = app.add_subcommand("simulate", "Simulate the plant or the loop (traj.csv)");
  common(simulate);
  simulate->add_option("--mode", mode, "open | closed | closed-quantized | closed-triggered");

  auto* check = app.add_subcommand("check", "Evaluate the quantized-loop stability conditions");
  common(check);

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = cli::load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (dump) {
      std::cout << cli::dump_config(config);
      return cli::kSuccess;
    }
    if (discretize->parsed()) return cli::cmd_discretize(config, std::cout);
    if (sweep->parsed()) {
      const cli::Range point{config.sampling.h1, config.sampling.h1, 1};
      const auto r1 = h1_range.empty() ? point : cli::parse_range(h1_range);
      const auto r2 = h2_range.empty() ? cli::Range{config.sampling.h2, config.sampling.h2, 1}
                                       : cli::parse_range(h2_range);
      return cli::cmd_sweep_rho(config, r1, r2, std::cout);
    }
    if (simulate->parsed()) return cli::cmd_simulate(config, cli::parse_mode(mode), std::cout);
    return cli::cmd_check(config, std::cout);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const r2dnet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
