#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pcs/cs_models.hpp"

using namespace pcs;

namespace {

Graph01Model left_graph() {
  const std::pair<std::size_t, std::size_t> e[] = {{0, 1}, {1, 2}, {1, 3}, {2, 3}};
  return Graph01Model::from_edges(4, e);
}

}  // namespace

TEST_CASE("0-1 sensing") {
  const std::pair<std::size_t, std::size_t> one[] = {{0, 1}};
  const auto g = Graph01Model::from_edges(2, one);
  const std::size_t speaker1[] = {1};
  CHECK(senses_busy_graph01(g, 0, speaker1));
  CHECK(g.hears(1, 0));

  const auto empty = Graph01Model::from_edges(3, {});
  const std::size_t all[] = {1, 2};
  CHECK_FALSE(senses_busy_graph01(empty, 0, all));

  const std::size_t three_four[] = {2, 3};
  CHECK_FALSE(senses_busy_graph01(left_graph(), 0, three_four));
  CHECK(senses_busy_graph01(left_graph(), 1, three_four));

  const std::size_t self[] = {0};
  CHECK_THROWS(senses_busy_graph01(g, 0, self));
}

TEST_CASE("range sensing uses a strict threshold") {
  CsRangeModel m;
  const Position at400[] = {{400, 0}};
  const Position at550[] = {{550, 0}};
  CHECK(senses_busy_csrange(m, {0, 0}, at400));
  CHECK_FALSE(senses_busy_csrange(m, {0, 0}, at550));
  CHECK_FALSE(senses_busy_csrange(m, {0, 0}, {}));
}

TEST_CASE("bernoulli sensing") {
  RandomStream rng(5);
  const std::size_t one[] = {1};
  const auto always = BernoulliModel::uniform(2, 1.0);
  const auto never = BernoulliModel::uniform(2, 0.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(senses_busy_bernoulli(always, 0, one, rng));
    CHECK_FALSE(senses_busy_bernoulli(never, 0, one, rng));
  }

  // Busy probability with m independent speakers is 1 - (1 - p)^m.
  const auto m = BernoulliModel::uniform(4, 0.3);
  const std::size_t three[] = {1, 2, 3};
  int busy = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) busy += senses_busy_bernoulli(m, 0, three, rng);
  CHECK(busy / double(n) == doctest::Approx(1 - std::pow(0.7, 3)).epsilon(0.01));
}

TEST_CASE("bernoulli sensing takes one draw per speaker") {
  const auto m = BernoulliModel::uniform(4, 0.5);
  const std::size_t three[] = {1, 2, 3};
  RandomStream a(11), b(11);
  senses_busy_bernoulli(m, 0, three, a);
  for (int i = 0; i < 3; ++i) b.uniform01();
  CHECK(a.next() == b.next());
}

TEST_CASE("model validation") {
  CHECK_NOTHROW(validate_cs_model(DetailedPqrModel{}, 2));
  CHECK_THROWS(validate_cs_model(DetailedPqrModel{1.2, 0.0, 0.0, 5, 0.0}, 2));
  CHECK_THROWS(validate_cs_model(DetailedPqrModel{0.5, 0.0, 0.0, 3, 0.0}, 2));
  CHECK_THROWS(validate_cs_model(CsRangeModel{0.0}, 2));
  CHECK_THROWS(validate_cs_model(BernoulliModel::uniform(3, 0.5), 2));
  Graph01Model asym = Graph01Model::from_edges(2, {});
  asym.adjacency[1] = 1;
  CHECK_THROWS(validate_cs_model(asym, 2));
}

TEST_CASE("interference relation") {
  const Position senders[] = {{0, 0}, {100, 0}, {1000, 0}};
  CHECK(may_interact(CsRangeModel{}, senders, 0, 1));
  CHECK_FALSE(may_interact(CsRangeModel{}, senders, 0, 2));
  CHECK(may_interact(left_graph(), senders, 0, 1));
  CHECK_FALSE(may_interact(left_graph(), senders, 0, 2));
  CHECK_FALSE(may_interact(BernoulliModel::uniform(3, 0.0), senders, 0, 1));
  CHECK(may_interact(DetailedPqrModel{}, senders, 0, 2));
}

namespace {

// Listener counts down for k idle slots, then the speaker starts.
bool tracked_after(int k, double q, RandomStream& rng) {
  DetailedPqrModel m{0.5, q, 0.0, 5, 0.0};
  SensingState s;
  for (int i = 0; i < k; ++i) s = detailed_step(m, s, {false, false, false, true}, 38, rng).state;
  s = detailed_step(m, s, {true, true, false, true}, 38, rng).state;
  return s.phase == SensingPhase::Tracking;
}

}  // namespace

TEST_CASE("preamble detection follows 1 - (1 - q)^k") {
  RandomStream rng(17);
  for (double q : {0.04, 0.1}) {
    for (int k : {1, 5, 15}) {
      const int n = 40000;
      int hits = 0;
      for (int i = 0; i < n; ++i) hits += tracked_after(k, q, rng);
      const double expect = 1.0 - std::pow(1.0 - q, k);
      CAPTURE(q);
      CAPTURE(k);
      CHECK(std::abs(hits / double(n) - expect) < 0.01);
    }
  }
}

TEST_CASE("tracking, reservation and release") {
  RandomStream rng(1);
  DetailedPqrModel m{0.0, 1.0, 1.0, 5, 0.0};
  SensingState s;
  s = detailed_step(m, s, {false, false, false, true}, 10, rng).state;
  CHECK(s.armed);
  auto st = detailed_step(m, s, {true, true, false, true}, 10, rng);
  CHECK(st.frozen);
  CHECK(st.state.phase == SensingPhase::Tracking);
  CHECK(st.state.remaining == 4);
  for (int i = 0; i < 4; ++i) st = detailed_step(m, st.state, {false, true, false, true}, 10, rng);
  CHECK(st.state.phase == SensingPhase::Reserved);
  CHECK(st.state.remaining == 5);
  int frozen = 0;
  for (int i = 0; i < 5; ++i) {
    const bool last = i == 4;
    st = detailed_step(m, st.state, {false, true, last, true}, 10, rng);
    frozen += st.frozen;
  }
  CHECK(frozen == 5);
  CHECK(st.state == SensingState{});
}

TEST_CASE("failed decode falls back to the raised threshold") {
  RandomStream rng(1);
  DetailedPqrModel m{1.0, 1.0, 0.0, 4, 0.0};
  SensingState s{SensingPhase::Idle, 0, true};
  auto st = detailed_step(m, s, {true, true, false, true}, 10, rng);
  for (int i = 0; i < 3; ++i) st = detailed_step(m, st.state, {false, true, false, true}, 10, rng);
  CHECK(st.state.phase == SensingPhase::PostDecodeFail);
  st = detailed_step(m, st.state, {false, true, false, true}, 10, rng);
  CHECK_FALSE(st.frozen);
  st = detailed_step(m, st.state, {false, true, true, true}, 10, rng);
  CHECK(st.state == SensingState{});
}

TEST_CASE("missed transmissions freeze with probability p") {
  RandomStream rng(23);
  DetailedPqrModel m{0.47, 0.0, 0.0, 5, 0.0};
  auto st = detailed_step(m, {}, {true, true, false, true}, 1000000, rng);
  CHECK(st.state.phase == SensingPhase::MissedOngoing);
  int frozen = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    st = detailed_step(m, st.state, {false, true, false, true}, 1000000, rng);
    frozen += st.frozen;
  }
  CHECK(frozen / double(n) == doctest::Approx(0.47).epsilon(0.02));
}

TEST_CASE("a listener that is not counting never freezes or arms") {
  RandomStream rng(2);
  DetailedPqrModel m{1.0, 1.0, 1.0, 5, 1.0};
  auto st = detailed_step(m, {}, {false, false, false, false}, 38, rng);
  CHECK_FALSE(st.state.armed);
  st = detailed_step(m, st.state, {true, true, false, false}, 38, rng);
  CHECK(st.state.phase == SensingPhase::MissedOngoing);
  CHECK_FALSE(st.frozen);
}

TEST_CASE("inconsistent events are engine errors") {
  RandomStream rng(2);
  CHECK_THROWS_AS(detailed_step({}, {}, {true, true, true, true}, 38, rng), std::logic_error);
  CHECK_THROWS_AS(detailed_step({}, {}, {true, false, false, true}, 38, rng), std::logic_error);
  CHECK_THROWS_AS(detailed_step({}, {}, {false, false, true, true}, 38, rng), std::logic_error);
}

TEST_CASE("distance curves") {
  const auto c = DistanceCurve::default_p_curve();
  CHECK(c.non_increasing());
  CHECK(distance_to_p(0.2, c) == 1.0);
  CHECK(distance_to_p(12, c) == 1.0);
  CHECK(distance_to_p(31, c) == doctest::Approx(0.5));
  CHECK(distance_to_p(80, c) == 0.0);
  CHECK_THROWS(distance_to_p(-1, c));
  CHECK_THROWS(distance_to_p(1, DistanceCurve({{0, 0.1}, {5, 0.9}})));
  CHECK_THROWS(DistanceCurve({{5, 0.1}, {5, 0.2}}));
}
