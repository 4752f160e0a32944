#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pcs/config.hpp"
#include "pcs/dcf_sim.hpp"

namespace pcs {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides every seed in the config
  bool timestamp = true;
  int threads = 0;  // 0 = hardware concurrency
};

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single run
  int n = 0;        // runs with a defined value
};

struct AggregateRow {
  int link_id = 0;
  MetricSummary throughput_mbps;
  MetricSummary plr;
  MetricSummary attempts_per_s;
};

/// Runs seeds seed, seed+1, ... in parallel; results come back in seed order.
std::vector<SimResult> run_repetitions(const Scenario& base, int repetitions, int threads = 0);
std::vector<AggregateRow> aggregate(const std::vector<SimResult>& runs);

struct SweepPoint {
  double distance_m = 0.0;
  double p = 0.0;
  std::optional<double> capture;
  Scenario scenario;
};

/// One two-link scenario per distance; sensing is Bernoulli with p from the
/// curve and capture follows the capture curve (none when absent).
std::vector<SweepPoint> expand_sweep(const Scenario& base, const SweepConfig& sweep);

/// Matched-seed simulations of `g` with every edge heard with probability
/// `p`, returning sojourn metrics per seed.
std::vector<SojournMetrics> sojourn_runs(const ContentionGraph& g, double p, const SojournConfig& cfg,
                                         const PhyParams& phy, int threads = 0);

/// Each returns a process exit code; errors are reported on `err`.
int cmd_simulate(const Config& cfg, const RunOptions& opt, std::ostream& log, std::ostream& err);
int cmd_analyze(const Config& cfg, const RunOptions& opt, std::ostream& log, std::ostream& err);
int cmd_calibrate(const Config& cfg, const RunOptions& opt, std::ostream& log, std::ostream& err);
int cmd_sweep(const Config& cfg, const RunOptions& opt, std::ostream& log, std::ostream& err);

}  // namespace pcs
