#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pcs/dcf_sim.hpp"
#include "pcs/phy_timing.hpp"
#include "pcs/random_stream.hpp"

namespace pcs {

/// Counts of countdown values (slots between successive TxStarts of one link,
/// minus the frame airtime).
struct CountdownHistogram {
  std::vector<std::int64_t> counts;  // index = countdown slots
  std::int64_t total = 0;
  bool insufficient = false;  // built from fewer than two TxStarts

  void add(std::int64_t slot, std::int64_t n = 1);
  void merge(const CountdownHistogram& other);
  bool empty() const { return total == 0; }
  double fraction(std::int64_t slot) const;
  /// Mass in the closed interval [lo, hi].
  double mass(std::int64_t lo, std::int64_t hi) const;

  friend bool operator==(const CountdownHistogram&, const CountdownHistogram&) = default;
};

CountdownHistogram interarrival_to_countdown(std::span<const std::int64_t> tx_start_slots,
                                             std::int64_t tx_slots);
CountdownHistogram interarrival_to_countdown(const LinkReport& link, const PhyParams& phy);
/// All links of a run pooled together.
CountdownHistogram pooled_countdown(const SimReport& report);

/// Closed interval of countdown values.
struct SlotBand {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  friend bool operator==(const SlotBand&, const SlotBand&) = default;
};

/// [k*tx_slots, k*tx_slots + cw_min] for k = 0..count-1.
std::vector<SlotBand> full_cs_bands(const PhyParams& phy, int count = 3);

struct BandReport {
  std::vector<SlotBand> bands;
  std::vector<double> fraction;
  double out_of_band = 0.0;
  bool empty = false;
};

/// Throws std::invalid_argument on overlapping or inverted bands.
BandReport band_occupancy(const CountdownHistogram& hist, std::span<const SlotBand> bands);

struct ReportRow {
  int link_id = 0;
  double throughput_mbps = 0.0;
  std::optional<double> plr;
  std::int64_t attempts = 0;
  double attempts_per_s = 0.0;
};

ReportRow report_row(const SimReport& report, std::size_t link_index);

/// (attempts - received) / attempts; absent when there were no attempts.
std::optional<double> plr_from_counts(std::int64_t attempts, std::int64_t received);
std::int64_t received_from_plr(std::int64_t attempts, double plr);

/// Total-variation distance between the normalized histograms.
double distribution_distance(const CountdownHistogram& a, const CountdownHistogram& b);

/// `slot,count,fraction` rows.
void write_histogram_csv(std::ostream& out, const CountdownHistogram& hist);
/// Accepts the format above (fraction column optional, `#` lines skipped).
/// Errors name the offending row.
CountdownHistogram read_histogram_csv(std::istream& in);

/// One timestamp per row in microseconds, optional header. Errors name the row.
std::vector<double> read_timestamps_csv(std::istream& in);
/// Gaps between consecutive timestamps rounded to whole slots after removing
/// the unshared frame time. Rejects unsorted input and gaps shorter than a frame.
CountdownHistogram countdown_from_timestamps(std::span<const double> timestamps_us,
                                             const PhyParams& phy);

/// Moves every sample by an independent uniform offset in [-max_slots, max_slots],
/// clamped at 0.
CountdownHistogram jitter(const CountdownHistogram& hist, std::int64_t max_slots, RandomStream& rng);

}  // namespace pcs
