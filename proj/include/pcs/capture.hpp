#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "pcs/cs_models.hpp"
#include "pcs/random_stream.hpp"

namespace pcs {

enum class Outcome : std::uint8_t { Success, Lost };

/// Every overlapped transmission is lost.
struct NoCapture {};

/// Deterministic capture. survives[w * n + l] says whether w's packet is
/// received despite l's overlapping transmission. An empty matrix means
/// every sender dominates at its own receiver (short links far apart).
struct PerfectCapture {
  std::size_t n = 0;
  std::vector<std::uint8_t> survives;

  bool wins(std::size_t w, std::size_t l) const {
    return survives.empty() || survives[w * n + l] != 0;
  }
};

/// c[w * n + l] is the probability w's packet survives l's interference.
struct ProbabilisticCapture {
  std::size_t n = 0;
  std::vector<double> c;

  static ProbabilisticCapture uniform(std::size_t n, double c);
  double probability(std::size_t w, std::size_t l) const { return c[w * n + l]; }
};

using CaptureModel = std::variant<NoCapture, PerfectCapture, ProbabilisticCapture>;

void validate_capture_model(const CaptureModel& model, std::size_t n_links);

/// Outcome of one transmission given the links whose transmissions
/// overlapped it. Only the strongest interferer counts; without power
/// information that is the one with the lowest capture probability.
/// ProbabilisticCapture consumes exactly one draw whenever `interferers`
/// is non-empty.
Outcome resolve_one(std::size_t link, std::span<const std::size_t> interferers,
                    const CaptureModel& model, RandomStream& rng);

/// Resolves a set of mutually overlapping transmissions. Draws are taken in
/// set order from `rng`.
std::vector<Outcome> resolve(std::span<const std::size_t> overlap_set, const CaptureModel& model,
                             RandomStream& rng);

/// Capture probability implied by a measured loss ratio, relative to the
/// loss ratio seen with no capture at all (clamped to [0, 1]).
double capture_probability_from_plr(double plr, double no_capture_plr);

/// Distance -> capture probability knots derived from the measured
/// PLR-vs-distance trend over the full-sensing range (0.2 m to 12 m).
DistanceCurve default_capture_curve();

}  // namespace pcs
