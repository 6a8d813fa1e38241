#include <CLI11.hpp>

#include <iostream>

#include "symbound/cli.hpp"

using namespace symbound;

int main(int argc, char** argv) {
  CLI::App app{"symbound: step-size limits for boundedness-preserving symplectic schemes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::uint64_t seed = kDefaultSeed;
  bool quiet = false;
  app.add_option("--config", config_path, "Run config file");
  app.add_option("--out", out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--seed", seed, "Seed for verify")->capture_default_str();
  app.add_flag("--quiet", quiet, "Suppress text output");

  auto* analyze = app.add_subcommand("analyze", "Classify equilibria and tabulate tau_max and verdicts");
  auto* simulate = app.add_subcommand("simulate", "Write long orbits near equilibria");
  auto* sweep = app.add_subcommand("sweep", "Sample trace S over a tau grid and locate the transition");
  auto* errordemo = app.add_subcommand("errordemo", "Iterate the linear error recurrence");
  auto* verify = app.add_subcommand("verify", "Run the built-in property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kSuccess : cli::kUsageError;
  }

  std::ostream null_stream(nullptr);
  std::ostream& text = quiet ? null_stream : std::cout;

  try {
    if (verify->parsed()) {
      return cli::cmd_verify(seed, out_dir.empty() ? "" : out_dir, text, !out_dir.empty());
    }
    if (config_path.empty()) {
      std::cerr << "error: --config is required for this command\n";
      return cli::kUsageError;
    }
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const cli::fs::path out = cfg.output_dir;
    if (analyze->parsed()) return cli::cmd_analyze(cfg, out, text);
    if (simulate->parsed()) return cli::cmd_simulate(cfg, out, text);
    if (sweep->parsed()) return cli::cmd_sweep(cfg, out, text);
    if (errordemo->parsed()) return cli::cmd_errordemo(cfg, out, text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsageError;
  }
  return cli::kUsageError;
}
