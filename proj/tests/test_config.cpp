#include <doctest.h>

#include "pcs/config.hpp"

using namespace pcs;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("scenario section") {
  const auto c = parse_config(R"(
scenario:
  phy: 80211a-default
  separation_m: 20
  cs: {model: detailed, p: 0.5, q: 0.03, r: 1}
  capture: {model: probabilistic, c: 0.9}
  duration_s: 2
  seed: 9
  repetitions: 3
)");
  REQUIRE(c.scenario);
  const auto& s = c.scenario->scenario;
  CHECK(s.links.size() == 2);
  CHECK(s.seed == 9);
  CHECK(c.scenario->repetitions == 3);
  CHECK(s.duration_slots == slots_for_seconds(default_80211a(), 2));
  const auto& m = std::get<DetailedPqrModel>(s.cs);
  CHECK(m.p == 0.5);
  CHECK(m.q == 0.03);
  CHECK(m.r == 1.0);
  CHECK(std::get<ProbabilisticCapture>(s.capture).probability(0, 1) == 0.9);
}

TEST_CASE("links, graphs and phy overrides") {
  const auto c = parse_config(R"(
scenario:
  phy: {preset: 80211a-default, cw_min: 31}
  links:
    - {sender: [0, 0], receiver: [0, 1]}
    - {id: 7, sender: [100, 0], receiver: [100, 1]}
    - {sender: [900, 0], receiver: [900, 1]}
  cs:
    model: graph01
    graph: {links: 3, edges: [[1, 2]]}
  duration_slots: 1000
)");
  const auto& s = c.scenario->scenario;
  CHECK(s.phy.cw_min == 31);
  CHECK(s.links[1].id == 7);
  CHECK(s.links[2].id == 3);
  const auto& g = std::get<Graph01Model>(s.cs);
  CHECK(g.hears(0, 1));
  CHECK_FALSE(g.hears(0, 2));

  const auto o = parse_config("scenario:\n  links: 1\n  duration_s: 1\n  phy: {ofdm: {payload_bytes: 500}}\n");
  CHECK(to_micros(unshared_tx_time(o.scenario->scenario.phy)) == doctest::Approx(194.0));
}

TEST_CASE("unknown keys and bad values are fatal with a line number") {
  CHECK(error_line("scenario:\n  links: 1\n  duration_s: 1\n  sead: 3\n") == 4);
  CHECK(error_line("scenario:\n  links: 1\n  duration_s: 0\n") == 3);
  CHECK(error_line("scenario:\n  links: 1\n  duration_s: 1\n  cs: {model: bernoulli, p: 1.5}\n") == 4);
  CHECK(error_line("scenario:\n  links: 1\n  duration_s: 1\n  cs: {model: magic}\n") == 4);
  CHECK(error_line("simulation:\n  links: 1\n") == 1);
  CHECK(error_line("scenario:\n  links: [1, 2\n") > 0);
  CHECK(error_line("scenario:\n  links: 1\n") > 0);
  CHECK(error_line("scenario:\n  links: 2\n  duration_s: 1\n  cs: {model: detailed, tracking_slots: 3}\n") == 4);
  CHECK_THROWS_AS(parse_config(""), ConfigError);
}

TEST_CASE("analysis section") {
  const auto c = parse_config(R"(
analysis:
  graph: {cycle: 6}
  operations: [mis, partial, escape, sojourn, clique]
  hearing_p: 0.8
  partial: {method: simulation, repetitions: 2, duration_s: 1}
  escape: {mis: [1, 3, 5], p: 0.8}
  sojourn: {p: [1, 0.8], seeds: 4}
  clique: {links: [1, 2], airtimes: [0.5, 0.5, 0, 0, 0, 0]}
)");
  REQUIRE(c.analysis);
  const auto& a = *c.analysis;
  CHECK(a.graph.size() == 6);
  CHECK(std::holds_alternative<SimDelegate>(a.partial));
  CHECK(std::get<SimDelegate>(a.partial).repetitions == 2);
  CHECK(a.escape->mis == 0b10101u);
  CHECK(a.sojourn.p_values == std::vector<double>{1.0, 0.8});
  CHECK(a.clique->links == std::vector<int>{0, 1});
  CHECK(*a.hearing_p == 0.8);

  CHECK(error_line("analysis:\n  graph: {cycle: 4}\n  operations: [mis, dance]\n") == 3);
  CHECK(error_line("analysis:\n  graph: {cycle: 4}\n  operations: [escape]\n") > 0);
  CHECK(error_line("analysis:\n  graph: {links: 2, edges: [[1, 3]]}\n") > 0);
  CHECK_THROWS_AS(parse_config("analysis:\n  graph: missing_file.txt\n"), ConfigError);
}

TEST_CASE("calibration and sweep sections") {
  const auto c = parse_config(R"(
scenario:
  links: 2
  duration_s: 1
calibration:
  self_target: {p: 0.47, q: 0.04, r: 0, slots: 5000}
  grid:
    p: {lo: 0, hi: 1, step: 0.25}
    r: [0, 1]
    refine: false
    polish: false
  sim_slots: 1000
  polish_sim_slots: 3000
sweep:
  distance_m: [1, 20, 50]
  p_curve: [[12, 1], [50, 0]]
  capture_curve: none
)");
  REQUIRE(c.calibration);
  CHECK(c.calibration->grid.p.step == 0.25);
  CHECK(c.calibration->grid.r == std::vector<double>{0, 1});
  CHECK_FALSE(c.calibration->grid.refine);
  CHECK(c.calibration->fit.sim_slots == 1000);
  CHECK(c.calibration->fit.polish_sim_slots == 3000);
  CHECK_FALSE(c.calibration->grid.polish);
  CHECK(c.calibration->self_target_slots == 5000);
  REQUIRE(c.sweep);
  CHECK(c.sweep->distances_m.size() == 3);
  CHECK_FALSE(c.sweep->capture_curve.has_value());

  CHECK(error_line("calibration:\n  grid: {p: {lo: 0.5, hi: 0.2}}\n  self_target: {}\n") > 0);
  CHECK(error_line("calibration:\n  sim_slots: 10\n") > 0);
  CHECK(error_line("sweep:\n  distance_m: [1, 2]\n  p_curve: [[12, 1], [5, 0]]\n") > 0);
}
