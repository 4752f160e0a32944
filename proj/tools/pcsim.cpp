#include <CLI11.hpp>

#include <iostream>

#include "pcs/commands.hpp"
#include "pcs/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pcsim: 802.11 DCF simulator with partial carrier sensing"};
  app.require_subcommand(1);

  std::string config_path;
  pcs::RunOptions opt;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool no_timestamp = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "YAML config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override every seed in the config");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the generated-at line from outputs");
    sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
  };
  auto* simulate = app.add_subcommand("simulate", "run the scenario section");
  auto* analyze = app.add_subcommand("analyze", "run the analysis section on a contention graph");
  auto* calibrate = app.add_subcommand("calibrate", "fit (p, q, r) or the distance curve");
  auto* sweep = app.add_subcommand("sweep", "run the scenario over the sweep distances");
  for (auto* s : {simulate, analyze, calibrate, sweep}) add_common(s);

  CLI11_PARSE(app, argc, argv);

  pcs::Config cfg;
  try {
    cfg = pcs::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return 2;
  }
  opt.out_dir = out_dir;
  opt.timestamp = !no_timestamp;
  for (auto* s : {simulate, analyze, calibrate, sweep})
    if (s->count("--seed")) opt.seed = seed;

  if (simulate->parsed()) return pcs::cmd_simulate(cfg, opt, std::cout, std::cerr);
  if (analyze->parsed()) return pcs::cmd_analyze(cfg, opt, std::cout, std::cerr);
  if (calibrate->parsed()) return pcs::cmd_calibrate(cfg, opt, std::cout, std::cerr);
  return pcs::cmd_sweep(cfg, opt, std::cout, std::cerr);
}
