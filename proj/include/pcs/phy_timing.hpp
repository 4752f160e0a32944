#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>

namespace pcs {

using Nanos = std::chrono::nanoseconds;

/// 802.11 DCF timing for one fixed-size saturated flow.
///
/// Durations are integer nanoseconds so that slot arithmetic is exact on
/// every platform. The unshared airtime of one exchange is
/// packet + SIFS + ACK + DIFS; backoff is drawn uniformly from [0, cw_min].
struct PhyParams {
  Nanos packet_duration{};  // preamble/header + MAC header + payload airtime
  Nanos sifs{};
  Nanos ack_duration{};
  Nanos difs{};
  Nanos slot{};
  int cw_min = 0;
  int cw_max = 1023;  // only consulted when exponential backoff is enabled
  std::int64_t payload_bits = 0;

  /// Throws std::invalid_argument unless every duration is positive,
  /// 1 <= cw_min <= cw_max and payload_bits > 0.
  void validate() const;

  friend bool operator==(const PhyParams&, const PhyParams&) = default;
};

/// The "80211a-default" preset: 54 Mbps, 1460-byte payload, CWmin 15,
/// 9 us slot, 340 us unshared airtime.
///
/// Only the 340 us total is fixed; the split below (246/16/44/34 us) is one
/// plausible breakdown of it.
PhyParams default_80211a();

/// Looks up a named preset; std::nullopt when unknown.
std::optional<PhyParams> phy_preset(std::string_view name);

/// Builds a profile from the 802.11a OFDM airtime rules: 20 us PLCP
/// preamble + SIGNAL, 4 us symbols, 16 service + 6 tail bits, a 28-byte
/// MAC header + FCS on the data frame, and a 14-byte ACK at the basic rate.
/// SIFS = 16 us, slot = 9 us, DIFS = SIFS + 2 slots.
PhyParams ofdm_80211a_profile(int payload_bytes, int data_rate_mbps,
                              int basic_rate_mbps);

Nanos unshared_tx_time(const PhyParams& phy);

/// Airtime of one exchange in whole slots (ceiling).
std::int64_t tx_slots(const PhyParams& phy);

enum class ClosedFormKind { Isolated, FullCsPair, PerfectCapturePair };

/// Analytical per-link throughput in bits/s with mean backoff cw_min/2.
double closed_form_throughput(ClosedFormKind kind, const PhyParams& phy);

inline double to_seconds(Nanos d) { return std::chrono::duration<double>(d).count(); }
inline double to_micros(Nanos d) { return std::chrono::duration<double, std::micro>(d).count(); }

}  // namespace pcs
