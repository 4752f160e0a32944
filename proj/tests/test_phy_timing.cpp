#include <doctest.h>

#include <array>
#include <stdexcept>
#include <tuple>

#include "oracles.hpp"
#include "pcs/phy_timing.hpp"

using namespace pcs;
using namespace std::chrono_literals;

TEST_CASE("default profile totals 340 us over 38 slots") {
  const auto phy = default_80211a();
  CHECK(unshared_tx_time(phy) == 340us);
  CHECK(tx_slots(phy) == 38);
  CHECK(phy.slot == 9us);
  CHECK(phy.cw_min == 15);
  CHECK(phy.payload_bits == 1460 * 8);
  CHECK(phy_preset("80211a-default") == phy);
  CHECK_FALSE(phy_preset("80211b").has_value());
}

TEST_CASE("unshared time with all components zero") {
  PhyParams phy;
  CHECK(unshared_tx_time(phy) == 0ns);
}

TEST_CASE("OFDM profile matches the first-principles airtime") {
  const std::array<std::tuple<int, int, int>, 4> cases{{{500, 54, 6}, {1460, 54, 6}, {100, 24, 12}, {1500, 6, 6}}};
  for (auto [bytes, rate, basic] : cases) {
    const auto phy = ofdm_80211a_profile(bytes, rate, basic);
    CHECK(to_micros(unshared_tx_time(phy)) == doctest::Approx(oracle::ofdm_exchange_us(bytes, rate, basic)));
  }
  CHECK(to_micros(unshared_tx_time(ofdm_80211a_profile(500, 54, 6))) == doctest::Approx(194.0));
  CHECK_THROWS(ofdm_80211a_profile(500, 53, 6));
}

TEST_CASE("slot conversion rounds up") {
  auto phy = default_80211a();
  phy.packet_duration = 9us * 30 - phy.sifs - phy.ack_duration - phy.difs;
  CHECK(tx_slots(phy) == 30);
  phy.packet_duration += 1us;  // 341 us total at a 9 us slot is still under 38 slots
  phy = default_80211a();
  phy.packet_duration += 1us;
  CHECK(to_micros(unshared_tx_time(phy)) == doctest::Approx(341.0));
  CHECK(tx_slots(phy) == 38);
  phy.packet_duration += 1us;  // 342 = 38 * 9 exactly
  CHECK(tx_slots(phy) == 38);
  phy.packet_duration += 1ns;
  CHECK(tx_slots(phy) == 39);
}

TEST_CASE("slot count brackets the airtime") {
  for (int extra = 0; extra < 40; ++extra) {
    auto phy = default_80211a();
    phy.packet_duration += std::chrono::microseconds(extra);
    const auto k = tx_slots(phy);
    CHECK(k * phy.slot >= unshared_tx_time(phy));
    CHECK((k - 1) * phy.slot < unshared_tx_time(phy));
  }
}

TEST_CASE("closed-form throughputs") {
  const auto phy = default_80211a();
  CHECK(closed_form_throughput(ClosedFormKind::Isolated, phy) / 1e6 == doctest::Approx(28.66).epsilon(0.0004));
  CHECK(closed_form_throughput(ClosedFormKind::FullCsPair, phy) / 1e6 == doctest::Approx(15.63).epsilon(0.0006));
  CHECK(closed_form_throughput(ClosedFormKind::PerfectCapturePair, phy) / 1e6 == doctest::Approx(16.51).epsilon(0.0006));
}

TEST_CASE("closed forms are ordered for any profile") {
  for (int cw : {1, 3, 7, 15, 31, 63})
    for (int bytes : {100, 500, 1460}) {
      auto phy = ofdm_80211a_profile(bytes, 54, 6);
      phy.cw_min = cw;
      const double full = closed_form_throughput(ClosedFormKind::FullCsPair, phy);
      const double cap = closed_form_throughput(ClosedFormKind::PerfectCapturePair, phy);
      const double iso = closed_form_throughput(ClosedFormKind::Isolated, phy);
      CHECK(full < cap);
      CHECK(cap < iso);
    }
}

TEST_CASE("unshared time is additive in each component") {
  const auto base = default_80211a();
  for (Nanos PhyParams::*field : {&PhyParams::packet_duration, &PhyParams::sifs, &PhyParams::ack_duration, &PhyParams::difs}) {
    auto phy = base;
    phy.*field += 7us;
    CHECK(unshared_tx_time(phy) - unshared_tx_time(base) == 7us);
  }
}

TEST_CASE("validation rejects non-positive fields") {
  auto phy = default_80211a();
  CHECK_NOTHROW(phy.validate());
  phy.slot = 0ns;
  CHECK_THROWS_AS(phy.validate(), std::invalid_argument);
  phy = default_80211a();
  phy.cw_min = 0;
  CHECK_THROWS_AS(phy.validate(), std::invalid_argument);
  phy = default_80211a();
  phy.payload_bits = 0;
  CHECK_THROWS_AS(phy.validate(), std::invalid_argument);
}
