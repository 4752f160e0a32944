#include "pcs/calibration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "pcs/dcf_sim.hpp"
#include "pcs/scenario.hpp"

namespace pcs {

namespace {

bool better(const Candidate& a, const Candidate& b) {
  if (a.objective != b.objective) return a.objective < b.objective;
  if (a.p != b.p) return a.p < b.p;
  if (a.q != b.q) return a.q < b.q;
  return a.r < b.r;
}

std::uint64_t pass_seed(std::uint64_t master, int pass) {
  return derive_seed(master, 0xf17, static_cast<std::uint64_t>(pass));
}

double snap(double v) { return std::round(v * 1e9) / 1e9; }

std::vector<double> axis_around(double centre, double radius, double step) {
  if (step <= 0.0 || radius <= 0.0) return {centre};
  std::vector<double> out;
  const auto k = static_cast<int>(std::floor(radius / step + 1e-9));
  for (int i = -k; i <= k; ++i) {
    const double v = snap(centre + i * step);
    if (v >= 0.0 && v <= 1.0) out.push_back(v);
  }
  return out;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  unsigned hw = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  hw = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  if (hw <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < hw; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lk(err_mu);
          if (!err) err = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

std::vector<double> GridAxis::values() const {
  if (!(step > 0.0)) {
    if (lo != hi) throw std::invalid_argument("grid: step must be positive");
    return {lo};
  }
  std::vector<double> out;
  const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(snap(lo + i * step));
  return out;
}

void GridSpec::validate() const {
  for (const GridAxis* a : {&p, &q}) {
    if (!(a->lo >= 0.0 && a->hi <= 1.0 && a->lo <= a->hi)) throw std::invalid_argument("grid: bounds must lie in [0, 1]");
    if (a->step < 0.0) throw std::invalid_argument("grid: negative step");
  }
  if (r.empty()) throw std::invalid_argument("grid: empty r list");
  for (double v : r)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("grid: r outside [0, 1]");
  if (fine_p_radius < 0 || fine_p_step < 0 || fine_q_radius < 0 || fine_q_step < 0)
    throw std::invalid_argument("grid: negative refinement parameter");
}

CountdownHistogram simulate_pqr_histogram(const DetailedPqrModel& model, const FitOptions& opt,
                                          std::int64_t slots, std::uint64_t seed) {
  Scenario s;
  s.links = two_link_layout(1.0);
  s.phy = opt.phy;
  s.cs = model;
  s.capture = opt.capture;
  s.duration_slots = slots;
  s.seed = seed;
  s.trace = TraceLevel::None;
  return pooled_countdown(run(s).report);
}

FitResult fit_pqr(const CountdownHistogram& target, const GridSpec& grid, const FitOptions& opt) {
  if (target.empty()) throw std::invalid_argument("fit: empty target histogram");
  grid.validate();
  if (opt.sim_slots <= 0) throw std::invalid_argument("fit: sim_slots must be positive");

  FitResult res;
  res.grid = grid;
  res.sim_slots = opt.sim_slots;
  res.seed = opt.seed;

  auto evaluate = [&](std::vector<Candidate>& cands, std::int64_t slots, int pass) {
    if (static_cast<std::int64_t>(res.evaluations.size() + cands.size()) > opt.max_candidates)
      throw BudgetExceeded("fit: candidate budget of " + std::to_string(opt.max_candidates) + " exhausted");
    const std::uint64_t seed = pass_seed(opt.seed, pass);
    parallel_for(cands.size(), opt.threads, [&](std::size_t i) {
      DetailedPqrModel m{cands[i].p, cands[i].q, cands[i].r, opt.tracking_slots, opt.p_high};
      const auto h = simulate_pqr_histogram(m, opt, slots, seed);
      cands[i].objective = h.empty() ? 1.0 : distribution_distance(h, target);
      cands[i].pass = pass;
    });
    res.evaluations.insert(res.evaluations.end(), cands.begin(), cands.end());
    return *std::min_element(cands.begin(), cands.end(), better);
  };

  std::vector<Candidate> coarse;
  for (double p : grid.p.values())
    for (double q : grid.q.values())
      for (double r : grid.r) coarse.push_back({p, q, r});
  if (coarse.empty()) throw std::invalid_argument("fit: empty grid");
  const std::int64_t coarse_slots = grid.refine && opt.coarse_sim_slots > 0 ? opt.coarse_sim_slots : opt.sim_slots;
  Candidate best = evaluate(coarse, coarse_slots, 0);

  if (grid.refine) {
    std::vector<Candidate> fine;
    for (double p : axis_around(best.p, grid.fine_p_radius, grid.fine_p_step))
      for (double q : axis_around(best.q, grid.fine_q_radius, grid.fine_q_step))
        for (double r : grid.fine_all_r ? grid.r : std::vector<double>{best.r}) fine.push_back({p, q, r});
    best = evaluate(fine, opt.sim_slots, 1);
    if (grid.polish) {
      std::vector<Candidate> polish;
      for (double p : axis_around(best.p, grid.fine_p_step / 2, grid.fine_p_step / 2))
        for (double q : GridAxis{grid.q.lo, grid.q.hi, grid.fine_q_step / 2}.values()) polish.push_back({p, q, best.r});
      best = evaluate(polish, opt.polish_sim_slots > 0 ? opt.polish_sim_slots : opt.sim_slots, 2);
    }
  }

  res.p = best.p;
  res.q = best.q;
  res.r = best.r;
  res.objective = best.objective;
  const std::uint64_t seed = pass_seed(opt.seed, grid.refine ? (grid.polish ? 2 : 1) : 0);
  const bool polished = grid.refine && grid.polish && opt.polish_sim_slots > 0;
  res.fitted = simulate_pqr_histogram({res.p, res.q, res.r, opt.tracking_slots, opt.p_high}, opt,
                                      polished ? opt.polish_sim_slots : opt.sim_slots, seed);
  return res;
}

void write_fit_report(std::ostream& out, const FitResult& fit) {
  out << "p: " << fit.p << '\n'
      << "q: " << fit.q << '\n'
      << "r: " << fit.r << '\n'
      << "objective_tv: " << fit.objective << '\n'
      << "grid_p: [" << fit.grid.p.lo << ", " << fit.grid.p.hi << "] step " << fit.grid.p.step << '\n'
      << "grid_q: [" << fit.grid.q.lo << ", " << fit.grid.q.hi << "] step " << fit.grid.q.step << '\n'
      << "grid_r:";
  for (double r : fit.grid.r) out << ' ' << r;
  out << '\n';
  if (fit.grid.refine)
    out << "refine: p +-" << fit.grid.fine_p_radius << " step " << fit.grid.fine_p_step << ", q +-"
        << fit.grid.fine_q_radius << " step " << fit.grid.fine_q_step << '\n';
  if (fit.grid.refine && fit.grid.polish)
    out << "polish: p +-" << fit.grid.fine_p_step / 2 << " step " << fit.grid.fine_p_step / 2 << ", q full axis step "
        << fit.grid.fine_q_step / 2 << '\n';
  out << "sim_slots: " << fit.sim_slots << '\n'
      << "seed: " << fit.seed << '\n'
      << "candidates: " << fit.evaluations.size() << '\n';
}

DistanceCurve fit_distance_curve(std::span<const AttemptRow> rows, double isolated_rate, double full_cs_rate) {
  if (!(isolated_rate > 0.0) || !(full_cs_rate > 0.0)) throw std::invalid_argument("distance fit: rates must be positive");
  if (isolated_rate == full_cs_rate) throw std::invalid_argument("distance fit: isolated and full-CS rates are equal");
  if (rows.empty()) throw std::invalid_argument("distance fit: no rows");
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (!(rows[k].distance_m > rows[k - 1].distance_m))
      throw std::invalid_argument("distance fit: rows must be sorted by strictly increasing distance");

  std::vector<CurveKnot> knots;
  for (const auto& row : rows) {
    const double p = (isolated_rate - row.attempts_per_s) / (isolated_rate - full_cs_rate);
    knots.push_back({row.distance_m, std::clamp(p, 0.0, 1.0)});
  }
  // Upper envelope: a knot never drops below anything farther out.
  for (std::size_t k = knots.size() - 1; k-- > 0;) knots[k].value = std::max(knots[k].value, knots[k + 1].value);
  return DistanceCurve(std::move(knots));
}

}  // namespace pcs
