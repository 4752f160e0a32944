#include "pcs/cs_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pcs {

namespace {

void check_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

Graph01Model Graph01Model::from_edges(
    std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges) {
  Graph01Model m;
  m.n = n;
  m.adjacency.assign(n * n, 0);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw std::invalid_argument("graph01: edge endpoint out of range");
    if (a == b) throw std::invalid_argument("graph01: self-loop");
    m.adjacency[a * n + b] = 1;
    m.adjacency[b * n + a] = 1;
  }
  return m;
}

Graph01Model Graph01Model::complete(std::size_t n) {
  Graph01Model m;
  m.n = n;
  m.adjacency.assign(n * n, 1);
  for (std::size_t i = 0; i < n; ++i) m.adjacency[i * n + i] = 0;
  return m;
}

BernoulliModel BernoulliModel::uniform(std::size_t n, double p) {
  BernoulliModel m;
  m.n = n;
  m.p.assign(n * n, p);
  for (std::size_t i = 0; i < n; ++i) m.p[i * n + i] = 0.0;
  return m;
}

void DetailedPqrModel::validate() const {
  check_probability(p, "detailed: p");
  check_probability(q, "detailed: q");
  check_probability(r, "detailed: r");
  check_probability(p_high, "detailed: p_high");
  if (tracking_slots != 4 && tracking_slots != 5)
    throw std::invalid_argument("detailed: tracking_slots must be 4 or 5");
}

void validate_cs_model(const CsModel& model, std::size_t n_links) {
  std::visit(
      [n_links](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Graph01Model>) {
          if (m.n == 0 && m.adjacency.empty()) return;
          if (m.n != n_links || m.adjacency.size() != n_links * n_links)
            throw std::invalid_argument("graph01: dimension does not match link count");
          for (std::size_t i = 0; i < m.n; ++i) {
            if (m.adjacency[i * m.n + i]) throw std::invalid_argument("graph01: self-loop");
            for (std::size_t j = 0; j < m.n; ++j)
              if (m.adjacency[i * m.n + j] != m.adjacency[j * m.n + i])
                throw std::invalid_argument("graph01: edge set must be symmetric");
          }
        } else if constexpr (std::is_same_v<M, CsRangeModel>) {
          if (!(m.cs_range_m > 0.0)) throw std::invalid_argument("csrange: range must be positive");
        } else if constexpr (std::is_same_v<M, BernoulliModel>) {
          if (m.n != n_links || m.p.size() != n_links * n_links)
            throw std::invalid_argument("bernoulli: dimension does not match link count");
          for (double v : m.p) check_probability(v, "bernoulli: p");
        } else {
          m.validate();
        }
      },
      model);
}

bool may_interact(const CsModel& model, std::span<const Position> senders, std::size_t a,
                  std::size_t b) {
  if (a == b) return false;
  return std::visit(
      [&](const auto& m) -> bool {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Graph01Model>) {
          return m.hears(a, b);
        } else if constexpr (std::is_same_v<M, CsRangeModel>) {
          return distance(senders[a], senders[b]) < m.cs_range_m;
        } else if constexpr (std::is_same_v<M, BernoulliModel>) {
          return m.hearing(a, b) > 0.0 || m.hearing(b, a) > 0.0;
        } else {
          return true;
        }
      },
      model);
}

bool senses_busy_graph01(const Graph01Model& model, std::size_t listener,
                         std::span<const std::size_t> speakers_active) {
  for (std::size_t s : speakers_active) {
    if (s == listener) throw std::invalid_argument("graph01: listener listed as active speaker");
    if (model.hears(listener, s)) return true;
  }
  return false;
}

bool senses_busy_csrange(const CsRangeModel& model, Position listener,
                         std::span<const Position> speaker_positions) {
  return std::any_of(speaker_positions.begin(), speaker_positions.end(),
                     [&](Position s) { return distance(listener, s) < model.cs_range_m; });
}

bool senses_busy_bernoulli(const BernoulliModel& model, std::size_t listener,
                           std::span<const std::size_t> speakers_active, RandomStream& rng) {
  bool busy = false;
  for (std::size_t s : speakers_active) {
    if (s == listener) throw std::invalid_argument("bernoulli: listener listed as active speaker");
    busy |= rng.bernoulli(model.hearing(listener, s));
  }
  return busy;
}

DetailedStep detailed_step(const DetailedPqrModel& model, SensingState state,
                           const PairEvents& ev, std::int64_t frame_slots, RandomStream& rng) {
  if (ev.speaker_starts && ev.speaker_stops)
    throw std::logic_error("engine error: speaker starts and stops in the same slot");
  if ((ev.speaker_starts || ev.speaker_stops) && !ev.speaker_active)
    throw std::logic_error("engine error: start/stop event for an inactive speaker");

  if (ev.speaker_starts) {
    if (ev.listener_counting && state.phase == SensingPhase::Idle && state.armed) {
      state = {SensingPhase::Tracking, model.tracking_slots, false};
    } else {
      state = {SensingPhase::MissedOngoing, 0, false};
    }
  }

  bool frozen = false;
  switch (state.phase) {
    case SensingPhase::Idle:
      if (!ev.listener_counting) {
        state.armed = false;
      } else if (!ev.speaker_active && !state.armed) {
        state.armed = rng.bernoulli(model.q);
      }
      break;
    case SensingPhase::MissedOngoing:
      frozen = ev.listener_counting && rng.bernoulli(model.p);
      break;
    case SensingPhase::Tracking:
      frozen = true;
      if (--state.remaining <= 0) {
        const std::int64_t rest = frame_slots - model.tracking_slots;
        if (rng.bernoulli(model.r)) {
          state = rest > 0 ? SensingState{SensingPhase::Reserved, rest, false}
                           : SensingState{};
        } else {
          state = {SensingPhase::PostDecodeFail, 0, false};
        }
      }
      break;
    case SensingPhase::Reserved:
      frozen = true;
      if (--state.remaining <= 0) state = {};
      break;
    case SensingPhase::PostDecodeFail:
      frozen = ev.listener_counting && rng.bernoulli(model.p_high);
      break;
  }

  if (ev.speaker_stops && state.phase != SensingPhase::Reserved) state = {};
  return {state, frozen};
}

DistanceCurve::DistanceCurve(std::vector<CurveKnot> knots) : knots_(std::move(knots)) {
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i].distance_m > knots_[i - 1].distance_m))
      throw std::invalid_argument("distance curve: knot distances must strictly increase");
}

double DistanceCurve::at(double d) const {
  if (knots_.empty()) throw std::logic_error("distance curve: no knots");
  if (d <= knots_.front().distance_m) return knots_.front().value;
  if (d >= knots_.back().distance_m) return knots_.back().value;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), d,
                             [](double x, const CurveKnot& k) { return x < k.distance_m; });
  auto lo = hi - 1;
  const double t = (d - lo->distance_m) / (hi->distance_m - lo->distance_m);
  return lo->value + t * (hi->value - lo->value);
}

bool DistanceCurve::non_increasing() const {
  return std::is_sorted(knots_.begin(), knots_.end(),
                        [](const CurveKnot& a, const CurveKnot& b) { return a.value > b.value; });
}

bool DistanceCurve::non_decreasing() const {
  return std::is_sorted(knots_.begin(), knots_.end(),
                        [](const CurveKnot& a, const CurveKnot& b) { return a.value < b.value; });
}

DistanceCurve DistanceCurve::default_p_curve() { return DistanceCurve({{12.0, 1.0}, {50.0, 0.0}}); }

double distance_to_p(double d, const DistanceCurve& curve) {
  if (!(d >= 0.0)) throw std::invalid_argument("distance_to_p: distance must be >= 0");
  if (!curve.non_increasing())
    throw std::invalid_argument("distance_to_p: curve must be non-increasing");
  for (const auto& k : curve.knots()) check_probability(k.value, "distance_to_p: knot value");
  return curve.at(d);
}

}  // namespace pcs
