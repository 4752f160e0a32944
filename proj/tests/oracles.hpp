#pragma once

// Reference computations written independently of the library.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

// Two saturated links that always hear each other, fixed window [0, w],
// frames of t slots. State = residual counters (a, b) at the start of a
// contention round. The smaller counter wins the round; the loser keeps
// its residual. Equal counters collide and both redraw.
struct RenewalPair {
  double pair_throughput_per_slot = 0.0;  // successful frames per slot, per link
  double attempts_per_slot = 0.0;         // per link
  double collision_round_fraction = 0.0;
  double plr = 0.0;                       // no capture
};

inline RenewalPair renewal_pair(int w, int t, bool capture) {
  const int n = w + 1;
  std::vector<double> pi(n * n, 1.0 / (n * n)), next(n * n);
  const double fresh = 1.0 / n;
  for (int it = 0; it < 5000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double m = pi[a * n + b];
        if (a == b) {
          for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) next[x * n + y] += m * fresh * fresh;
        } else if (a < b) {
          for (int x = 0; x < n; ++x) next[x * n + (b - a)] += m * fresh;
        } else {
          for (int y = 0; y < n; ++y) next[(a - b) * n + y] += m * fresh;
        }
      }
    pi.swap(next);
  }
  double dur = 0.0, succ_a = 0.0, att_a = 0.0, coll = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double m = pi[a * n + b];
      dur += m * (std::min(a, b) + t);
      if (a == b) {
        coll += m;
        att_a += m;
        if (capture) succ_a += m;
      } else if (a < b) {
        att_a += m;
        succ_a += m;
      }
    }
  RenewalPair r;
  r.pair_throughput_per_slot = succ_a / dur;
  r.attempts_per_slot = att_a / dur;
  r.collision_round_fraction = coll;
  r.plr = 2 * coll / (2 * coll + (1 - coll));
  return r;
}

// 802.11a OFDM exchange time in microseconds from first principles:
// 20 us PLCP preamble and SIGNAL, 4 us per symbol, 16 service bits and
// 6 tail bits, 28 bytes of MAC header and FCS, a 14-byte ACK at the basic
// rate, SIFS 16 us, DIFS = SIFS + 2 * 9 us.
inline double ofdm_exchange_us(int payload_bytes, int rate_mbps, int basic_mbps) {
  auto frame = [](int bytes, int mbps) {
    const int bits_per_symbol = mbps * 4;
    const int bits = 16 + 8 * bytes + 6;
    return 20.0 + 4.0 * ((bits + bits_per_symbol - 1) / bits_per_symbol);
  };
  return frame(payload_bytes + 28, rate_mbps) + 16.0 + frame(14, basic_mbps) + 34.0;
}

// Every subset checked pair by pair.
inline std::vector<std::uint32_t> brute_force_independent(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    bool ok = true;
    for (auto [a, b] : edges)
      if ((s >> a & 1u) && (s >> b & 1u)) ok = false;
    if (ok) out.push_back(s);
  }
  return out;
}

}  // namespace oracle
