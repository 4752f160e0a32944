#include "pcs/capture.hpp"

#include <algorithm>
#include <stdexcept>

namespace pcs {

ProbabilisticCapture ProbabilisticCapture::uniform(std::size_t n, double c) {
  ProbabilisticCapture m;
  m.n = n;
  m.c.assign(n * n, c);
  return m;
}

void validate_capture_model(const CaptureModel& model, std::size_t n_links) {
  if (const auto* p = std::get_if<PerfectCapture>(&model)) {
    if (!p->survives.empty() && (p->n != n_links || p->survives.size() != n_links * n_links))
      throw std::invalid_argument("capture: perfect matrix does not match link count");
  } else if (const auto* pc = std::get_if<ProbabilisticCapture>(&model)) {
    if (pc->n != n_links || pc->c.size() != n_links * n_links)
      throw std::invalid_argument("capture: probability matrix does not match link count");
    for (double v : pc->c)
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("capture: probabilities must lie in [0, 1]");
  }
}

Outcome resolve_one(std::size_t link, std::span<const std::size_t> interferers,
                    const CaptureModel& model, RandomStream& rng) {
  if (interferers.empty()) return Outcome::Success;
  return std::visit(
      [&](const auto& m) -> Outcome {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, NoCapture>) {
          return Outcome::Lost;
        } else if constexpr (std::is_same_v<M, PerfectCapture>) {
          const bool all = std::all_of(interferers.begin(), interferers.end(),
                                       [&](std::size_t j) { return m.wins(link, j); });
          return all ? Outcome::Success : Outcome::Lost;
        } else {
          double c = 1.0;
          for (std::size_t j : interferers) c = std::min(c, m.probability(link, j));
          return rng.uniform01() < c ? Outcome::Success : Outcome::Lost;
        }
      },
      model);
}

std::vector<Outcome> resolve(std::span<const std::size_t> overlap_set, const CaptureModel& model,
                             RandomStream& rng) {
  if (overlap_set.empty()) throw std::invalid_argument("resolve: empty overlap set");
  std::vector<Outcome> out;
  out.reserve(overlap_set.size());
  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < overlap_set.size(); ++k) {
    others.clear();
    for (std::size_t m = 0; m < overlap_set.size(); ++m)
      if (m != k) others.push_back(overlap_set[m]);
    out.push_back(resolve_one(overlap_set[k], others, model, rng));
  }
  return out;
}

double capture_probability_from_plr(double plr, double no_capture_plr) {
  if (!(no_capture_plr > 0.0)) throw std::invalid_argument("capture: baseline PLR must be positive");
  return std::clamp(1.0 - plr / no_capture_plr, 0.0, 1.0);
}

DistanceCurve default_capture_curve() {
  // Measured PLR at 0.2, 1, 3, 6, 12 m against the no-capture baseline 2/17.
  constexpr double kBaseline = 2.0 / 17.0;
  const double distances[] = {0.2, 1.0, 3.0, 6.0, 12.0};
  const double plr[] = {0.129, 0.050, 0.010, 0.010, 0.007};
  std::vector<CurveKnot> knots;
  double running = 0.0;
  for (std::size_t i = 0; i < std::size(distances); ++i) {
    running = std::max(running, capture_probability_from_plr(plr[i], kBaseline));
    knots.push_back({distances[i], running});
  }
  return DistanceCurve(std::move(knots));
}

}  // namespace pcs
