#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rcm/commands.hpp"
#include "rcm/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-species competition process toolkit"};
  app.fallthrough(true);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--seed", seed, "Overrides the config seed")
      ->each([&](const std::string&) { seed_given = true; });

  CLI::App* analyze = app.add_subcommand("analyze", "Deterministic map analysis");
  CLI::App* simulate = app.add_subcommand("simulate", "Sample one trajectory");
  CLI::App* qsd = app.add_subcommand("qsd", "Quasi-stationary distribution");
  CLI::App* sweep = app.add_subcommand("sweep", "Scaling study across K");
  CLI::App* cycles = app.add_subcommand("cycles", "Mass near an attracting cycle");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    rcm::RunConfig cfg = rcm::load_run_config(config_path);
    if (seed_given) cfg.seed = seed;
    std::filesystem::create_directories(out_dir);

    if (analyze->parsed()) rcm::cmd_analyze(cfg, out_dir);
    if (simulate->parsed()) rcm::cmd_simulate(cfg, out_dir);
    if (qsd->parsed()) rcm::cmd_qsd(cfg, out_dir);
    if (sweep->parsed()) rcm::cmd_sweep(cfg, out_dir);
    if (cycles->parsed()) rcm::cmd_cycles(cfg, out_dir);
    return 0;
  } catch (const rcm::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rcm::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 4;
  } catch (const rcm::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
