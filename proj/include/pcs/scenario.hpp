#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcs/capture.hpp"
#include "pcs/cs_models.hpp"
#include "pcs/phy_timing.hpp"

namespace pcs {

struct LinkSpec {
  int id = 0;
  Position sender;
  Position receiver;
};

enum class TraceLevel : std::uint8_t {
  None,           // no event log; reports still carry TxStart slots
  Transmissions,  // TxStart / TxEnd
  Freezes,        // plus one FreezeSlot per frozen countdown slot
};

/// Everything one simulation run needs. Links are saturated. Matrices inside
/// the sensing and capture models are indexed by position in `links`.
struct Scenario {
  std::vector<LinkSpec> links;
  PhyParams phy = default_80211a();
  CsModel cs = Graph01Model{};
  CaptureModel capture = NoCapture{};
  std::int64_t duration_slots = 0;
  std::uint64_t seed = 0;
  bool exponential_backoff = false;
  TraceLevel trace = TraceLevel::Transmissions;
};

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxLinks = 64;

/// Throws ScenarioError describing the first problem found.
void validate(const Scenario& scenario);

/// Number of whole slots covering `seconds` of simulated time.
std::int64_t slots_for_seconds(const PhyParams& phy, double seconds);

/// Two short links (sender-receiver 0.1 m) whose senders are `separation_m`
/// apart, ids 1 and 2.
std::vector<LinkSpec> two_link_layout(double separation_m);

/// `n` links with ids 1..n placed far apart; positions only matter to the
/// CsRange model.
std::vector<LinkSpec> abstract_links(std::size_t n);

}  // namespace pcs
