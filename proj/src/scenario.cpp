#include "pcs/scenario.hpp"

#include <cmath>
#include <set>

namespace pcs {

void validate(const Scenario& s) {
  if (s.links.empty()) throw ScenarioError("scenario: at least one link is required");
  if (s.links.size() > kMaxLinks)
    throw ScenarioError("scenario: at most " + std::to_string(kMaxLinks) + " links supported");
  std::set<int> ids;
  for (const auto& l : s.links)
    if (!ids.insert(l.id).second)
      throw ScenarioError("scenario: duplicate link id " + std::to_string(l.id));
  if (s.duration_slots <= 0) throw ScenarioError("scenario: duration must be positive");
  try {
    s.phy.validate();
    validate_cs_model(s.cs, s.links.size());
    validate_capture_model(s.capture, s.links.size());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  if (std::holds_alternative<DetailedPqrModel>(s.cs) && tx_slots(s.phy) < 2)
    throw ScenarioError("scenario: detailed sensing needs frames of at least 2 slots");
}

std::int64_t slots_for_seconds(const PhyParams& phy, double seconds) {
  if (!(seconds > 0.0)) return 0;
  return static_cast<std::int64_t>(std::ceil(seconds / to_seconds(phy.slot) - 1e-9));
}

std::vector<LinkSpec> two_link_layout(double separation_m) {
  return {
      {1, {0.0, 0.0}, {0.0, 0.1}},
      {2, {separation_m, 0.0}, {separation_m, 0.1}},
  };
}

std::vector<LinkSpec> abstract_links(std::size_t n) {
  std::vector<LinkSpec> links;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 1.0e4 * static_cast<double>(i);
    links.push_back({static_cast<int>(i + 1), {x, 0.0}, {x, 0.1}});
  }
  return links;
}

}  // namespace pcs
