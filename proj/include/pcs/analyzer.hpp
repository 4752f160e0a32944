#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pcs/capture.hpp"
#include "pcs/dcf_sim.hpp"
#include "pcs/phy_timing.hpp"

namespace pcs {

/// A set of links as a bitmask over link indices (bit i = link index i).
using LinkSet = std::uint32_t;

inline constexpr int kDefaultEnumerationCap = 24;

class EnumerationCapExceeded : public std::runtime_error {
 public:
  EnumerationCapExceeded(int n_links, int cap);
  int n_links() const { return n_links_; }
  int cap() const { return cap_; }

 private:
  int n_links_;
  int cap_;
};

/// Undirected contention graph over links. Each edge carries the probability
/// that the endpoints hear each other (1 for the classical 0-1 graph).
class ContentionGraph {
 public:
  ContentionGraph() = default;
  explicit ContentionGraph(int n_links);

  static ContentionGraph cycle(int n);
  static ContentionGraph complete(int n);

  /// 0-based link indices; p in (0, 1]. Re-adding an edge overwrites p.
  void add_edge(int a, int b, double p = 1.0);

  int size() const { return n_; }
  bool adjacent(int a, int b) const;
  double hearing(int a, int b) const;
  std::vector<std::pair<int, int>> edges() const;
  /// Links adjacent to `a`. Requires size() <= 32.
  LinkSet neighbors(int a) const;
  bool probabilistic() const;

  /// Parses the edge-list format: a `links N` header, then `edge i j [p]`
  /// lines with 1-based link numbers. Blank lines and `#` comments are
  /// ignored. Throws std::runtime_error naming the offending line.
  static ContentionGraph parse(std::istream& in);
  void write(std::ostream& out) const;

 private:
  int n_ = 0;
  std::vector<double> p_;  // n*n, 0 = no edge
};

/// Exact rational, always reduced with a positive denominator.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction of(std::int64_t num, std::int64_t den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

bool is_independent(const ContentionGraph& g, LinkSet s);

/// Every independent set, including the empty set, in increasing bitmask
/// order. Refuses graphs above `cap` links.
std::vector<LinkSet> independent_sets(const ContentionGraph& g, int cap = kDefaultEnumerationCap);

/// Independent sets of maximum cardinality.
std::vector<LinkSet> maximum_independent_sets(const ContentionGraph& g,
                                              int cap = kDefaultEnumerationCap);

/// Share of maximum independent sets containing each link.
std::vector<Fraction> mis_throughput(const ContentionGraph& g, int cap = kDefaultEnumerationCap);

struct StationaryResult {
  std::vector<LinkSet> sets;
  std::vector<double> probability;  // per set, sums to 1
  std::vector<double> throughput;   // per link
};

/// Product-form stationary law of ideal CSMA: P(s) proportional to
/// intensity^|s| over independent sets.
StationaryResult stationary_distribution(const ContentionGraph& g, double access_intensity,
                                         int cap = kDefaultEnumerationCap);
std::vector<double> stationary_throughput(const ContentionGraph& g, double access_intensity,
                                          int cap = kDefaultEnumerationCap);

/// Average MIS throughput over random realizations of the probabilistic
/// edges. With `exact`, every realization is enumerated with its probability
/// (at most 20 fractional edges).
struct EdgeRealization {
  std::int64_t samples = 1000;
  std::uint64_t seed = 1;
  bool exact = false;
};

/// Runs dcf-sim with Bernoulli sensing on the graph's edges and normalizes
/// each link's throughput by the isolated-link closed form.
struct SimDelegate {
  PhyParams phy = default_80211a();
  std::int64_t duration_slots = 0;  // 0 = 60 s
  int repetitions = 5;
  std::uint64_t seed = 1;
  CaptureModel capture = PerfectCapture{};
};

using PartialMethod = std::variant<EdgeRealization, SimDelegate>;

struct ThroughputEstimate {
  std::vector<double> mean;
  std::vector<double> half_width;  // 95% normal-approximation half-width
  std::int64_t samples = 0;
};

ThroughputEstimate partial_throughput(const ContentionGraph& g, const PartialMethod& method,
                                      int cap = kDefaultEnumerationCap);

struct EscapeProbability {
  int link = 0;  // 0-based
  int active_neighbors = 0;
  double activation = 0.0;  // (1-p)^m
  double freeze = 0.0;      // 1 - (1-p)^m
};

/// For every link outside `current_mis`: the chance it can still count down
/// or transmit while the MIS is active, and the complementary freeze
/// probability. Rejects sets that are not maximum independent sets.
std::vector<EscapeProbability> mis_escape_probabilities(const ContentionGraph& g,
                                                        LinkSet current_mis, double p);

struct MisOccupancy {
  LinkSet mis = 0;
  double time_fraction = 0.0;  // slots with a non-empty transmitting set inside a sojourn here
  std::int64_t sojourns = 0;
};

struct SojournMetrics {
  std::vector<MisOccupancy> per_mis;
  std::int64_t sojourn_count = 0;
  double mean_sojourn_slots = 0.0;
  double median_sojourn_slots = 0.0;
  std::int64_t transitions = 0;  // consecutive sojourns in different MIS
};

/// Labels every slot of the trace with its transmitting set. A sojourn in
/// MIS A is a maximal run of slots whose set is a subset of A and which
/// contains at least one non-empty slot. When a set fits several MIS
/// (including the empty set) the incumbent keeps the slot; otherwise the
/// lowest-numbered containing MIS is chosen. Sets inside no MIS end the
/// sojourn.
SojournMetrics sojourn_metrics(const SimTrace& trace, const ContentionGraph& g,
                               int cap = kDefaultEnumerationCap);

/// Whether the airtimes of a clique fit in one channel: sum x_i <= 1.
/// Rejects link sets that are not cliques and airtimes outside [0, 1].
bool clique_feasible(const ContentionGraph& g, std::span<const int> clique,
                     std::span<const double> airtimes);

std::string format_link_set(LinkSet s);  // "{1,3}" with 1-based numbers

}  // namespace pcs
