#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcs/capture.hpp"
#include "pcs/cs_models.hpp"
#include "pcs/phy_timing.hpp"
#include "pcs/stats.hpp"

namespace pcs {

/// Inclusive arithmetic grid lo, lo+step, ..., hi.
struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.1;

  std::vector<double> values() const;
};

struct GridSpec {
  GridAxis p{0.0, 1.0, 0.1};
  GridAxis q{0.0, 0.12, 0.04};
  std::vector<double> r{0.0, 0.5, 1.0};
  // Second pass around the coarse optimum; step 0 disables a dimension.
  bool refine = true;
  double fine_p_radius = 0.06;
  double fine_p_step = 0.02;
  double fine_q_radius = 0.02;
  double fine_q_step = 0.01;
  bool fine_all_r = true;  // otherwise r stays at the coarse optimum
  // Third pass with r fixed: p within half a fine step of the second-pass
  // optimum and q over its whole axis, both at half the fine steps,
  // simulated at FitOptions::polish_sim_slots.
  bool polish = true;

  void validate() const;
};

struct FitOptions {
  PhyParams phy = default_80211a();
  std::int64_t sim_slots = 2'000'000;
  std::int64_t coarse_sim_slots = 1'000'000;  // 0 = sim_slots
  std::int64_t polish_sim_slots = 6'000'000;  // 0 = sim_slots
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::int64_t max_candidates = 100'000;
  int tracking_slots = 5;
  double p_high = 0.0;
  CaptureModel capture = NoCapture{};
};

struct Candidate {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
  double objective = 1.0;
  int pass = 0;  // 0 coarse, 1 fine
};

struct FitResult {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
  double objective = 1.0;
  GridSpec grid;
  std::int64_t sim_slots = 0;
  std::uint64_t seed = 0;
  std::vector<Candidate> evaluations;
  CountdownHistogram fitted;  // histogram at the estimate
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Countdown histogram of two saturated links that sense each other through
/// the detailed model, both links pooled.
CountdownHistogram simulate_pqr_histogram(const DetailedPqrModel& model, const FitOptions& opt,
                                          std::int64_t slots, std::uint64_t seed);

/// Coarse-to-fine grid search minimizing the total-variation distance to
/// `target`. Every candidate of a pass shares one seed. Ties go to the
/// smallest p, then the smallest q, then the smallest r.
FitResult fit_pqr(const CountdownHistogram& target, const GridSpec& grid, const FitOptions& opt);

void write_fit_report(std::ostream& out, const FitResult& fit);

struct AttemptRow {
  double distance_m = 0.0;
  double attempts_per_s = 0.0;
};

/// Maps attempt rates linearly onto p (full-CS rate -> 1, isolated rate -> 0),
/// clamps to [0, 1], then forces the curve non-increasing in distance.
DistanceCurve fit_distance_curve(std::span<const AttemptRow> rows, double isolated_rate,
                                 double full_cs_rate);

}  // namespace pcs
