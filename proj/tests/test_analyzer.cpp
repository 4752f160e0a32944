#include <doctest.h>

#include <algorithm>
#include <bit>
#include <sstream>

#include "oracles.hpp"
#include "pcs/analyzer.hpp"

using namespace pcs;

namespace {

ContentionGraph left_graph() {
  ContentionGraph g(4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(1, 3);
  g.add_edge(2, 3);
  return g;
}

ContentionGraph grid() {
  // top row 1 3 4, bottom row 2 5 6
  ContentionGraph g(6);
  for (auto [a, b] : {std::pair{1, 3}, {3, 4}, {2, 5}, {5, 6}, {1, 2}, {3, 5}, {4, 6}}) g.add_edge(a - 1, b - 1);
  return g;
}

LinkSet set_of(std::initializer_list<int> one_based) {
  LinkSet s = 0;
  for (int v : one_based) s |= LinkSet{1} << (v - 1);
  return s;
}

}  // namespace

TEST_CASE("independent sets match brute force") {
  RandomStream rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 10));
    ContentionGraph g(n);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (rng.bernoulli(0.35)) {
          g.add_edge(a, b);
          edges.emplace_back(a, b);
        }
    const auto got = independent_sets(g);
    CHECK(got == oracle::brute_force_independent(n, edges));
    for (LinkSet s : got) CHECK(is_independent(g, s));
  }
}

TEST_CASE("MIS throughput") {
  const auto left = mis_throughput(left_graph());
  CHECK(left == std::vector<Fraction>{Fraction::of(1, 1), Fraction::of(0, 1), Fraction::of(1, 2), Fraction::of(1, 2)});
  const auto ring = mis_throughput(ContentionGraph::cycle(6));
  CHECK(ring == std::vector<Fraction>(6, Fraction::of(1, 2)));
  CHECK(mis_throughput(ContentionGraph(5)) == std::vector<Fraction>(5, Fraction::of(1, 1)));
  CHECK(maximum_independent_sets(ContentionGraph::complete(4)).size() == 4);
  CHECK(mis_throughput(ContentionGraph(0)).empty());
}

TEST_CASE("enumeration cap") {
  CHECK_THROWS_AS(independent_sets(ContentionGraph::cycle(30)), EnumerationCapExceeded);
  CHECK_NOTHROW(independent_sets(ContentionGraph::cycle(30), 30));
  try {
    mis_throughput(ContentionGraph::cycle(25));
  } catch (const EnumerationCapExceeded& e) {
    CHECK(std::string(e.what()).find("Monte-Carlo") != std::string::npos);
    CHECK(e.cap() == 24);
  }
}

TEST_CASE("product-form stationary law") {
  ContentionGraph edge(2);
  edge.add_edge(0, 1);
  for (double rho : {0.5, 1.0, 3.0}) {
    const auto st = stationary_distribution(edge, rho);
    REQUIRE(st.sets.size() == 3);
    CHECK(st.probability[0] == doctest::Approx(1 / (1 + 2 * rho)));
    CHECK(st.probability[1] == doctest::Approx(rho / (1 + 2 * rho)));
    CHECK(st.throughput[0] == doctest::Approx(rho / (1 + 2 * rho)));
  }
  // Path 1-2-3: sets {}, {1}, {2}, {3}, {1,3}.
  ContentionGraph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  const double rho = 2.0, z = 1 + 3 * rho + rho * rho;
  const auto t = stationary_throughput(path, rho);
  CHECK(t[0] == doctest::Approx((rho + rho * rho) / z));
  CHECK(t[1] == doctest::Approx(rho / z));

  const auto zero = stationary_distribution(left_graph(), 0.0);
  CHECK(zero.probability[0] == 1.0);

  // Large intensity concentrates on the maximum independent sets.
  const auto big = stationary_throughput(left_graph(), 1e6);
  CHECK(big[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(big[1] == doctest::Approx(0.0).epsilon(1e-4));

  for (double rho : {0.1, 1.0, 10.0}) {
    const auto st = stationary_distribution(ContentionGraph::cycle(6), rho);
    double sum = 0.0;
    for (double p : st.probability) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  CHECK_THROWS(stationary_distribution(edge, -1.0));
}

TEST_CASE("edge realizations") {
  // One edge heard half the time: both links get 1 when absent, 1/2 when present.
  ContentionGraph g(2);
  g.add_edge(0, 1, 0.5);
  const auto exact = partial_throughput(g, EdgeRealization{0, 1, true});
  CHECK(exact.mean[0] == doctest::Approx(0.75));
  CHECK(exact.mean[1] == doctest::Approx(0.75));
  const auto mc = partial_throughput(g, EdgeRealization{20000, 3, false});
  CHECK(mc.mean[0] == doctest::Approx(0.75).epsilon(0.02));
  CHECK(mc.half_width[0] > 0.0);
  CHECK(mc.samples == 20000);

  const auto sure = partial_throughput(left_graph(), EdgeRealization{});
  CHECK(sure.mean == std::vector<double>{1.0, 0.0, 0.5, 0.5});
}

TEST_CASE("simulation delegate on an independent pair") {
  SimDelegate sd;
  sd.duration_slots = 200000;
  sd.repetitions = 2;
  const auto est = partial_throughput(ContentionGraph(2), sd);
  for (double v : est.mean) CHECK(v == doctest::Approx(1.0).epsilon(0.03));
  CHECK(est.samples == 2);
}

TEST_CASE("partial sensing lifts every link of the 6-cycle above half") {
  ContentionGraph g(6);
  for (auto [a, b] : ContentionGraph::cycle(6).edges()) g.add_edge(a, b, 0.8);
  const auto est = partial_throughput(g, SimDelegate{});
  for (double x : est.mean) CHECK(x > 0.5);
}

TEST_CASE("escape probabilities") {
  const auto esc = mis_escape_probabilities(grid(), set_of({1, 4, 5}), 0.8);
  REQUIRE(esc.size() == 3);
  for (const auto& e : esc) {
    if (e.link == 2) {  // link 3
      CHECK(e.active_neighbors == 3);
      CHECK(e.activation == doctest::Approx(0.008));
    } else {
      CHECK(e.active_neighbors == 2);
      CHECK(e.activation == doctest::Approx(0.04));
    }
    CHECK(e.activation + e.freeze == doctest::Approx(1.0));
  }
  const auto ring = mis_escape_probabilities(ContentionGraph::cycle(6), set_of({1, 3, 5}), 0.8);
  for (const auto& e : ring) CHECK(e.activation == doctest::Approx(0.04));
  CHECK_THROWS(mis_escape_probabilities(grid(), set_of({1, 4}), 0.8));
  CHECK_THROWS(mis_escape_probabilities(grid(), set_of({1, 4, 5}), 1.5));
}

TEST_CASE("sojourn labeling on a hand-built trace") {
  // 4-cycle: MIS {1,3} and {2,4}.
  const auto g = ContentionGraph::cycle(4);
  SimTrace t;
  t.n_links = 4;
  t.tx_slots = 10;
  t.duration_slots = 100;
  t.link_ids = {1, 2, 3, 4};
  auto start = [&](std::int64_t slot, std::uint32_t link) {
    t.events.push_back({slot, link, TraceEventKind::TxStart, Outcome::Success});
    t.events.push_back({slot + 10, link, TraceEventKind::TxEnd, Outcome::Success});
  };
  start(0, 0);   // {1} in [0,10)
  start(5, 2);   // {1,3} in [5,15)
  start(20, 1);  // {2} in [20,30) -> new sojourn in {2,4}
  start(40, 0);  // {1} in [40,50) -> back to {1,3}
  start(60, 2);  // {3} in [60,70), same sojourn (gap stays with incumbent)
  std::sort(t.events.begin(), t.events.end(), [](auto& a, auto& b) { return a.slot < b.slot; });
  const auto m = sojourn_metrics(t, g);
  CHECK(m.sojourn_count == 3);
  CHECK(m.transitions == 2);
  // Sojourns: [0,20) = 20 slots, [20,40) = 20 slots, [40,100) = 60 slots.
  CHECK(m.mean_sojourn_slots == doctest::Approx(100.0 / 3));
  CHECK(m.median_sojourn_slots == doctest::Approx(20.0));
  double busy = 0.0;
  for (const auto& o : m.per_mis) busy += o.time_fraction;
  CHECK(busy == doctest::Approx(0.45));  // non-empty slots: 15 + 10 + 10 + 10
}

TEST_CASE("sojourns on a simulated single link") {
  Scenario s;
  s.links = abstract_links(1);
  s.duration_slots = 100000;
  s.seed = 2;
  const auto r = run(s);
  const auto m = sojourn_metrics(r.trace, ContentionGraph(1));
  CHECK(m.sojourn_count == 1);
  CHECK(m.transitions == 0);
  const double air = double(r.report.links[0].transmitting_slots) / s.duration_slots;
  CHECK(m.per_mis[0].time_fraction == doctest::Approx(air).epsilon(0.001));
  CHECK_THROWS(sojourn_metrics(r.trace, ContentionGraph(2)));
}

TEST_CASE("clique feasibility") {
  ContentionGraph edge(2);
  edge.add_edge(0, 1);
  const int both[] = {0, 1};
  const double half[] = {0.5, 0.5};
  const double over[] = {0.6, 0.5};
  CHECK(clique_feasible(edge, both, half));
  CHECK_FALSE(clique_feasible(edge, both, over));
  const auto tri = ContentionGraph::complete(3);
  const int all3[] = {0, 1, 2};
  const double x[] = {0.4, 0.3, 0.3};
  CHECK(clique_feasible(tri, all3, x));
  const double bad[] = {1.2, 0.0};
  CHECK_THROWS(clique_feasible(edge, both, bad));
  CHECK_THROWS(clique_feasible(ContentionGraph(2), both, half));
}

TEST_CASE("graph file format") {
  std::istringstream in("# comment\nlinks 3\nedge 1 2\n\nedge 2 3 0.25\n");
  const auto g = ContentionGraph::parse(in);
  CHECK(g.size() == 3);
  CHECK(g.adjacent(0, 1));
  CHECK(g.hearing(2, 1) == 0.25);
  CHECK_FALSE(g.adjacent(0, 2));
  CHECK(g.probabilistic());
  std::ostringstream out;
  g.write(out);
  std::istringstream again(out.str());
  const auto g2 = ContentionGraph::parse(again);
  CHECK(g2.edges() == g.edges());

  std::istringstream bad("links 2\nedge 1 3\n");
  CHECK_THROWS_WITH(ContentionGraph::parse(bad), doctest::Contains("line 2"));
  std::istringstream nohead("edge 1 2\n");
  CHECK_THROWS(ContentionGraph::parse(nohead));
  std::istringstream badp("links 2\nedge 1 2 1.5\n");
  CHECK_THROWS(ContentionGraph::parse(badp));
  CHECK(format_link_set(set_of({1, 3})) == "{1,3}");
}
