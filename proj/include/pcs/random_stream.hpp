#pragma once

#include <cstdint>
#include <random>

namespace pcs {

/// What a random sub-stream is used for. Each (link, purpose) pair gets its
/// own generator so that extra links or extra consumers never shift the
/// draws an existing link sees.
enum class StreamPurpose : std::uint64_t {
  Backoff = 1,
  Sensing = 2,
  Capture = 3,
  Jitter = 4,
  Sampling = 5,
};

/// splitmix64-style mixing of a master seed with two stream coordinates.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// Seeded 64-bit Mersenne Twister with platform-independent conversions.
///
/// std::uniform_*_distribution results differ between standard libraries,
/// so the integer and real mappings are done here.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t master, std::uint64_t stream, StreamPurpose purpose)
      : engine_(derive_seed(master, stream, static_cast<std::uint64_t>(purpose))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [lo, hi], unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Bernoulli(p). p <= 0 and p >= 1 return without consuming a draw.
  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pcs
