#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pcs/capture.hpp"
#include "pcs/phy_timing.hpp"
#include "pcs/random_stream.hpp"
#include "pcs/scenario.hpp"

namespace pcs {

enum class TraceEventKind : std::uint8_t { TxStart, TxEnd, FreezeSlot };

struct TraceEvent {
  std::int64_t slot = 0;
  std::uint32_t link = 0;  // link index
  TraceEventKind kind = TraceEventKind::TxStart;
  Outcome outcome = Outcome::Success;  // meaningful for TxEnd only

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Slot-ordered event log. A TxEnd sits exactly tx_slots after its TxStart,
/// at the first slot the link is back in countdown.
struct SimTrace {
  std::size_t n_links = 0;
  std::int64_t tx_slots = 0;
  std::int64_t duration_slots = 0;
  std::vector<int> link_ids;
  std::vector<TraceEvent> events;

  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

struct LinkReport {
  int link_id = 0;
  std::int64_t attempts = 0;
  std::int64_t successes = 0;
  std::int64_t losses = 0;
  std::int64_t transmitting_slots = 0;
  std::int64_t frozen_slots = 0;
  double throughput_bps = 0.0;
  double attempts_per_s = 0.0;
  std::optional<double> plr;
  std::vector<std::int64_t> tx_starts;
  std::vector<std::int64_t> intervals;  // gaps between consecutive TxStarts, slots

  friend bool operator==(const LinkReport&, const LinkReport&) = default;
};

struct SimReport {
  std::int64_t duration_slots = 0;
  Nanos slot{};
  std::int64_t tx_slots = 0;
  std::int64_t payload_bits = 0;
  std::vector<LinkReport> links;

  double duration_seconds() const { return to_seconds(slot) * static_cast<double>(duration_slots); }

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

struct SimResult {
  SimTrace trace;
  SimReport report;
};

/// Uniform on [0, cw].
std::int64_t backoff_draw(std::int64_t cw, RandomStream& rng);
inline std::int64_t backoff_draw(const PhyParams& phy, RandomStream& rng) {
  return backoff_draw(phy.cw_min, rng);
}

/// Runs a saturated slot-synchronous DCF simulation.
///
/// Each slot, countdown links with a zero counter start unless they sense a
/// transmission already in progress; links still counting also sense the
/// transmissions starting this slot and decrement only when not frozen.
/// Transmissions in flight at the horizon are completed and counted.
/// Throws ScenarioError before any slot executes if the scenario is invalid.
SimResult run(const Scenario& scenario);

/// CSV: slot,link_id,event,outcome
void write_trace_csv(std::ostream& out, const SimTrace& trace);

/// CSV: link_id,throughput_mbps,plr,attempts_per_s,n_tx
void write_report_csv(std::ostream& out, const SimReport& report);

}  // namespace pcs
