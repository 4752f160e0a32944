#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcs/analyzer.hpp"
#include "pcs/calibration.hpp"
#include "pcs/scenario.hpp"

namespace pcs {

/// Carries "line L, column C: ..." for problems that have a location.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ScenarioConfig {
  Scenario scenario;
  int repetitions = 1;
};

struct SojournConfig {
  std::vector<double> p_values{1.0, 0.8};
  int seeds = 10;
  std::uint64_t seed = 1;
  std::int64_t duration_slots = 0;
};

struct EscapeConfig {
  LinkSet mis = 0;
  double p = 0.8;
};

struct CliqueConfig {
  std::vector<int> links;  // 0-based
  std::vector<double> airtimes;
};

struct AnalysisConfig {
  ContentionGraph graph;
  std::vector<std::string> operations;  // mis, stationary, partial, escape, sojourn, clique
  double intensity = 1.0;
  int cap = kDefaultEnumerationCap;
  PartialMethod partial = EdgeRealization{};
  std::optional<double> hearing_p;  // replaces every edge weight for partial/sojourn
  std::optional<EscapeConfig> escape;
  SojournConfig sojourn;
  std::optional<CliqueConfig> clique;
  PhyParams phy = default_80211a();
};

struct DistanceFitConfig {
  std::vector<AttemptRow> rows;
  double isolated_rate = 0.0;
  double full_cs_rate = 0.0;
};

struct CalibrationConfig {
  std::optional<std::filesystem::path> target;
  bool target_is_timestamps = false;
  std::optional<DetailedPqrModel> self_target;  // generate the target instead of reading one
  std::uint64_t self_target_seed = 0;
  std::int64_t self_target_slots = 10'000'000;
  GridSpec grid;
  FitOptions fit;
  std::optional<DistanceFitConfig> distance;
};

struct SweepConfig {
  std::vector<double> distances_m;
  DistanceCurve p_curve = DistanceCurve::default_p_curve();
  std::optional<DistanceCurve> capture_curve = default_capture_curve();
};

struct Config {
  std::filesystem::path base_dir;
  std::optional<ScenarioConfig> scenario;
  std::optional<AnalysisConfig> analysis;
  std::optional<CalibrationConfig> calibration;
  std::optional<SweepConfig> sweep;
};

/// Parses YAML text. Unknown keys are fatal. Relative file references are
/// resolved against `base_dir`.
Config parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
Config load_config(const std::filesystem::path& path);

}  // namespace pcs
