#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "pcs/random_stream.hpp"

namespace pcs {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(Position a, Position b);

/// Classical contention graph: a listener hears a speaker iff they share an
/// edge. Indices are link indices (0-based) within a scenario. A
/// default-constructed model has no edges for any link count.
struct Graph01Model {
  std::size_t n = 0;
  std::vector<std::uint8_t> adjacency;  // n*n, symmetric, zero diagonal

  static Graph01Model from_edges(std::size_t n,
                                 std::span<const std::pair<std::size_t, std::size_t>> edges);
  static Graph01Model complete(std::size_t n);

  bool hears(std::size_t listener, std::size_t speaker) const {
    return !adjacency.empty() && adjacency[listener * n + speaker] != 0;
  }
};

/// Distance threshold model: busy iff some sender is strictly closer than
/// cs_range_m to the listening sender.
struct CsRangeModel {
  double cs_range_m = 550.0;
};

/// Simplified partial sensing: while j transmits, i hears it in a given slot
/// with probability p(i, j), independently per slot.
struct BernoulliModel {
  std::size_t n = 0;
  std::vector<double> p;  // n*n, p[listener * n + speaker]

  static BernoulliModel uniform(std::size_t n, double p);
  double hearing(std::size_t listener, std::size_t speaker) const {
    return p[listener * n + speaker];
  }
};

/// Preamble-detection state machine for partial carrier sensing.
///
///  p              per-slot freeze probability for a transmission whose start
///                 was missed
///  q              per-slot detection opportunity while the speaker counts
///                 down; over k such slots a start is caught with
///                 probability 1 - (1 - q)^k
///  r              PHY-header decode probability after tracking
///  tracking_slots slots spent tracking the carrier (4 or 5)
///  p_high         per-slot freeze probability with the raised energy
///                 threshold after a failed decode
struct DetailedPqrModel {
  double p = 0.47;
  double q = 0.04;
  double r = 0.0;
  int tracking_slots = 5;
  double p_high = 0.0;

  void validate() const;
};

using CsModel = std::variant<Graph01Model, CsRangeModel, BernoulliModel, DetailedPqrModel>;

/// Throws std::invalid_argument when parameters are out of range or matrix
/// dimensions disagree with n_links.
void validate_cs_model(const CsModel& model, std::size_t n_links);

/// Whether two links can ever sense each other under the model; used as the
/// interference relation when resolving overlapping transmissions.
/// `senders` is only consulted for CsRangeModel.
bool may_interact(const CsModel& model, std::span<const Position> senders,
                  std::size_t a, std::size_t b);

bool senses_busy_graph01(const Graph01Model& model, std::size_t listener,
                         std::span<const std::size_t> speakers_active);

bool senses_busy_csrange(const CsRangeModel& model, Position listener,
                         std::span<const Position> speaker_positions);

/// One independent draw per active speaker; every draw is taken even after
/// a success so stream consumption does not depend on speaker order.
bool senses_busy_bernoulli(const BernoulliModel& model, std::size_t listener,
                           std::span<const std::size_t> speakers_active,
                           RandomStream& rng);

enum class SensingPhase : std::uint8_t {
  Idle,
  MissedOngoing,
  Tracking,
  Reserved,
  PostDecodeFail,
};

/// Per ordered (listener, speaker) pair.
struct SensingState {
  SensingPhase phase = SensingPhase::Idle;
  std::int64_t remaining = 0;  // Tracking / Reserved slots left
  bool armed = false;          // a detection opportunity has succeeded this countdown

  friend bool operator==(const SensingState&, const SensingState&) = default;
};

/// What the engine knows about the speaker (and the listener) this slot.
/// `speaker_stops` marks the speaker's final transmitting slot.
struct PairEvents {
  bool speaker_starts = false;
  bool speaker_active = false;
  bool speaker_stops = false;
  bool listener_counting = false;
};

struct DetailedStep {
  SensingState state;
  bool frozen = false;
};

/// Advances one pair by one slot. `frame_slots` is the speaker's frame length
/// (the reservation window). Throws std::logic_error on inconsistent events.
DetailedStep detailed_step(const DetailedPqrModel& model, SensingState state,
                           const PairEvents& events, std::int64_t frame_slots,
                           RandomStream& rng);

struct CurveKnot {
  double distance_m = 0.0;
  double value = 0.0;
};

/// Piecewise-linear curve over distance, clamped to the end knots.
class DistanceCurve {
 public:
  DistanceCurve() = default;
  /// Knots must have strictly increasing distances; throws otherwise.
  explicit DistanceCurve(std::vector<CurveKnot> knots);

  double at(double distance_m) const;
  const std::vector<CurveKnot>& knots() const { return knots_; }
  bool empty() const { return knots_.empty(); }
  bool non_increasing() const;
  bool non_decreasing() const;

  /// Full sensing up to 12 m, none from 50 m.
  static DistanceCurve default_p_curve();

 private:
  std::vector<CurveKnot> knots_;
};

/// Hearing probability at distance d. The curve must be non-increasing with
/// values in [0, 1].
double distance_to_p(double d, const DistanceCurve& curve);

}  // namespace pcs
