#include <doctest.h>

#include <sstream>

#include "pcs/calibration.hpp"
#include "pcs/dcf_sim.hpp"

using namespace pcs;

namespace {

GridSpec small_grid() {
  GridSpec g;
  g.p = {0.0, 1.0, 0.5};
  g.q = {0.0, 0.08, 0.04};
  g.r = {0.0, 1.0};
  g.refine = false;
  return g;
}

FitOptions quick(std::uint64_t seed = 1) {
  FitOptions o;
  o.sim_slots = 300'000;
  o.seed = seed;
  return o;
}

CountdownHistogram full_cs_target() {
  Scenario s;
  s.links = two_link_layout(1.0);
  s.cs = Graph01Model::complete(2);
  s.duration_slots = 1'000'000;
  s.seed = 77;
  s.trace = TraceLevel::None;
  return pooled_countdown(run(s).report);
}

}  // namespace

TEST_CASE("grid axes") {
  CHECK(GridAxis{0.0, 1.0, 0.25}.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(GridAxis{0.0, 0.12, 0.02}.values().size() == 7);
  CHECK(GridAxis{0.3, 0.3, 0.0}.values() == std::vector<double>{0.3});
  CHECK_THROWS(GridAxis{0.0, 1.0, 0.0}.values());
  GridSpec g;
  g.p.hi = 1.5;
  CHECK_THROWS(g.validate());
}

TEST_CASE("attempt rates to a distance curve") {
  const double counts[][2] = {{0.2, 1412}, {1, 1410}, {3, 1393}, {6, 1403},
                              {12, 1404}, {15, 1968}, {20, 2055}, {50, 2392}};
  std::vector<AttemptRow> rows;
  for (auto& c : counts) rows.push_back({c[0], c[1] / 60});
  const auto c = fit_distance_curve(rows, 2392.0 / 60, 1404.0 / 60);
  CHECK(c.non_increasing());
  CHECK(c.at(12) == 1.0);
  CHECK(c.at(50) == 0.0);
  CHECK(c.at(20) == doctest::Approx((2392.0 - 2055) / (2392 - 1404)));
  CHECK(c.at(20) == doctest::Approx(0.34).epsilon(0.01));
  CHECK(c.at(0.2) == 1.0);

  const AttemptRow flat[] = {{1, 1404}, {5, 1404}, {9, 1404}};
  const auto ones = fit_distance_curve(flat, 2392, 1404);
  for (const auto& k : ones.knots()) CHECK(k.value == 1.0);

  CHECK_THROWS(fit_distance_curve(flat, 1404, 1404));
  const AttemptRow unsorted[] = {{5, 1500}, {1, 1600}};
  CHECK_THROWS(fit_distance_curve(unsorted, 2392, 1404));
}

TEST_CASE("rates outside the anchors clamp and stay monotone") {
  const AttemptRow rows[] = {{1, 1300}, {2, 1700}, {3, 1500}, {4, 2500}};
  const auto c = fit_distance_curve(rows, 2392, 1404);
  CHECK(c.non_increasing());
  CHECK(c.at(1) == 1.0);
  CHECK(c.at(4) == 0.0);
  CHECK(c.at(2) >= c.at(3));
}

TEST_CASE("the returned estimate minimizes every evaluated objective") {
  const auto target = simulate_pqr_histogram({0.5, 0.04, 0.0, 5, 0.0}, quick(), 600'000, 999);
  const auto fit = fit_pqr(target, small_grid(), quick());
  CHECK(fit.evaluations.size() == 3 * 3 * 2);
  for (const auto& e : fit.evaluations) CHECK(fit.objective <= e.objective);
  CHECK(fit.objective >= 0.0);
  CHECK(fit.objective <= 1.0);
  CHECK(fit.p == 0.5);
}

TEST_CASE("fits are deterministic and independent of the thread count") {
  const auto target = simulate_pqr_histogram({0.5, 0.04, 1.0, 5, 0.0}, quick(), 300'000, 5);
  auto one = quick(3);
  one.threads = 1;
  auto two = quick(3);
  two.threads = 3;
  const auto a = fit_pqr(target, small_grid(), one);
  const auto b = fit_pqr(target, small_grid(), two);
  CHECK(a.p == b.p);
  CHECK(a.q == b.q);
  CHECK(a.r == b.r);
  CHECK(a.objective == b.objective);
  REQUIRE(a.evaluations.size() == b.evaluations.size());
  for (std::size_t i = 0; i < a.evaluations.size(); ++i) CHECK(a.evaluations[i].objective == b.evaluations[i].objective);
}

TEST_CASE("an isolated-link target fits no interaction") {
  Scenario s;
  s.links = abstract_links(1);
  s.duration_slots = 1'000'000;
  s.seed = 8;
  const auto target = interarrival_to_countdown(run(s).report.links[0], default_80211a());
  const auto fit = fit_pqr(target, small_grid(), quick());
  CHECK(fit.q == 0.0);
  CHECK(fit.p == 0.0);
  const auto bands = full_cs_bands(default_80211a());
  CHECK(band_occupancy(fit.fitted, bands).fraction[1] == 0.0);
  CHECK(fit.objective < 0.05);
}

TEST_CASE("a full-sensing target reproduces the second band") {
  const auto target = full_cs_target();
  const auto fit = fit_pqr(target, small_grid(), quick());
  const auto bands = full_cs_bands(default_80211a());
  CHECK(band_occupancy(target, bands).fraction[1] > 0.05);
  CHECK(band_occupancy(fit.fitted, bands).fraction[1] > 0.05);
  CHECK(fit.p == 1.0);
}

TEST_CASE("fit errors") {
  CHECK_THROWS(fit_pqr(CountdownHistogram{}, small_grid(), quick()));
  auto budget = quick();
  budget.max_candidates = 5;
  CountdownHistogram t;
  t.add(3);
  CHECK_THROWS_AS(fit_pqr(t, small_grid(), budget), BudgetExceeded);
  GridSpec empty = small_grid();
  empty.r.clear();
  CHECK_THROWS(fit_pqr(t, empty, quick()));
}

TEST_CASE("fit report") {
  FitResult f;
  f.p = 0.47;
  std::ostringstream out;
  write_fit_report(out, f);
  CHECK(out.str().find("p: 0.47") != std::string::npos);
  CHECK(out.str().find("objective_tv:") != std::string::npos);
}
