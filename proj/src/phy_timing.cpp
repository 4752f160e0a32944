#include "pcs/phy_timing.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pcs {

using namespace std::chrono_literals;

void PhyParams::validate() const {
  auto positive = [](Nanos d, const char* name) {
    if (d <= Nanos::zero())
      throw std::invalid_argument(std::string("phy: ") + name + " must be positive");
  };
  positive(packet_duration, "packet_duration");
  positive(sifs, "sifs");
  positive(ack_duration, "ack_duration");
  positive(difs, "difs");
  positive(slot, "slot");
  if (cw_min < 1) throw std::invalid_argument("phy: cw_min must be >= 1");
  if (cw_max < cw_min) throw std::invalid_argument("phy: cw_max must be >= cw_min");
  if (payload_bits <= 0) throw std::invalid_argument("phy: payload_bits must be positive");
}

PhyParams default_80211a() {
  PhyParams phy;
  phy.packet_duration = 246us;
  phy.sifs = 16us;
  phy.ack_duration = 44us;
  phy.difs = 34us;
  phy.slot = 9us;
  phy.cw_min = 15;
  phy.cw_max = 1023;
  phy.payload_bits = 1460 * 8;
  return phy;
}

std::optional<PhyParams> phy_preset(std::string_view name) {
  if (name == "80211a-default") return default_80211a();
  return std::nullopt;
}

namespace {

// 802.11a OFDM PPDU airtime for a PSDU of `bytes` at `rate_mbps`.
Nanos ofdm_ppdu_time(int bytes, int rate_mbps) {
  constexpr std::int64_t kPreambleAndSignalUs = 20;
  constexpr std::int64_t kSymbolUs = 4;
  const std::int64_t bits_per_symbol = std::int64_t{rate_mbps} * kSymbolUs;
  const std::int64_t bits = 16 + 8 * std::int64_t{bytes} + 6;
  const std::int64_t symbols = (bits + bits_per_symbol - 1) / bits_per_symbol;
  return std::chrono::microseconds(kPreambleAndSignalUs + kSymbolUs * symbols);
}

}  // namespace

PhyParams ofdm_80211a_profile(int payload_bytes, int data_rate_mbps,
                              int basic_rate_mbps) {
  if (payload_bytes <= 0 || data_rate_mbps <= 0 || basic_rate_mbps <= 0)
    throw std::invalid_argument("ofdm profile: sizes and rates must be positive");
  constexpr int kRates[] = {6, 9, 12, 18, 24, 36, 48, 54};
  for (int rate : {data_rate_mbps, basic_rate_mbps})
    if (std::find(std::begin(kRates), std::end(kRates), rate) == std::end(kRates))
      throw std::invalid_argument("ofdm profile: not an 802.11a rate");
  constexpr int kMacOverheadBytes = 28;
  constexpr int kAckBytes = 14;
  PhyParams phy;
  phy.packet_duration = ofdm_ppdu_time(payload_bytes + kMacOverheadBytes, data_rate_mbps);
  phy.sifs = 16us;
  phy.slot = 9us;
  phy.ack_duration = ofdm_ppdu_time(kAckBytes, basic_rate_mbps);
  phy.difs = phy.sifs + 2 * phy.slot;
  phy.cw_min = 15;
  phy.cw_max = 1023;
  phy.payload_bits = std::int64_t{payload_bytes} * 8;
  return phy;
}

Nanos unshared_tx_time(const PhyParams& phy) {
  return phy.packet_duration + phy.sifs + phy.ack_duration + phy.difs;
}

std::int64_t tx_slots(const PhyParams& phy) {
  const auto total = unshared_tx_time(phy).count();
  const auto slot = phy.slot.count();
  if (slot <= 0) throw std::invalid_argument("tx_slots: slot must be positive");
  return (total + slot - 1) / slot;
}

double closed_form_throughput(ClosedFormKind kind, const PhyParams& phy) {
  const double t_tr = to_seconds(unshared_tx_time(phy));
  const double mean_backoff = phy.cw_min / 2.0;
  const double backoff_time = mean_backoff * to_seconds(phy.slot);
  const double bits = static_cast<double>(phy.payload_bits);
  switch (kind) {
    case ClosedFormKind::Isolated:
      return bits / (t_tr + backoff_time);
    case ClosedFormKind::FullCsPair:
      return bits / (2.0 * t_tr + backoff_time);
    case ClosedFormKind::PerfectCapturePair: {
      // Same-slot starts share one airtime period; with cw_min = 15 the
      // shared fraction is 7.5 / 8.5.
      const double shared = mean_backoff / ((phy.cw_min + 2) / 2.0);
      return bits / ((1.0 + shared) * t_tr + backoff_time);
    }
  }
  throw std::invalid_argument("closed_form_throughput: unknown kind");
}

}  // namespace pcs
