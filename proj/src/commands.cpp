#include "pcs/commands.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pcs/stats.hpp"

namespace pcs {

namespace {

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
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < hw; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lk(mu);
          if (!err) err = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

MetricSummary summarize(const std::vector<double>& v) {
  MetricSummary s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const RunOptions& opt, const std::string& header) : path_(path) {
    out_.open(path);
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    if (opt.timestamp) out_ << fmt::format("# generated {:%Y-%m-%dT%H:%M:%SZ}\n", fmt::gmtime(std::time(nullptr)));
    out_ << header << '\n';
  }
  template <class... Args>
  void row(fmt::format_string<Args...> f, Args&&... args) {
    out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string opt_value(const std::optional<double>& v) { return v ? fmt::format("{:.6g}", *v) : std::string(); }

std::string metric(const MetricSummary& m) {
  if (m.n == 0) return ",";
  return fmt::format("{:.6g},{:.6g}", m.mean, m.sd);
}

void write_text(const std::filesystem::path& path, const RunOptions& opt, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (opt.timestamp) out << fmt::format("# generated {:%Y-%m-%dT%H:%M:%SZ}\n", fmt::gmtime(std::time(nullptr)));
  out << body;
}

ContentionGraph with_hearing(const ContentionGraph& g, double p) {
  ContentionGraph out(g.size());
  for (auto [a, b] : g.edges()) out.add_edge(a, b, p);
  return out;
}

template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const EnumerationCapExceeded& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

void write_histogram(const std::filesystem::path& path, const RunOptions& opt, const CountdownHistogram& h) {
  std::ostringstream body;
  write_histogram_csv(body, h);
  write_text(path, opt, body.str());
}

}  // namespace

std::vector<SimResult> run_repetitions(const Scenario& base, int repetitions, int threads) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  validate(base);
  std::vector<SimResult> out(static_cast<std::size_t>(repetitions));
  parallel_for(out.size(), threads, [&](std::size_t k) {
    Scenario s = base;
    s.seed = base.seed + k;
    out[k] = run(s);
  });
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<SimResult>& runs) {
  std::vector<AggregateRow> rows;
  if (runs.empty()) return rows;
  const std::size_t n = runs.front().report.links.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> thr, plr, att;
    for (const auto& r : runs) {
      const auto row = report_row(r.report, i);
      thr.push_back(row.throughput_mbps);
      att.push_back(row.attempts_per_s);
      if (row.plr) plr.push_back(*row.plr);
    }
    rows.push_back({runs.front().report.links[i].link_id, summarize(thr), summarize(plr), summarize(att)});
  }
  return rows;
}

std::vector<SweepPoint> expand_sweep(const Scenario& base, const SweepConfig& sweep) {
  std::vector<SweepPoint> out;
  for (double d : sweep.distances_m) {
    SweepPoint pt;
    pt.distance_m = d;
    pt.p = distance_to_p(d, sweep.p_curve);
    pt.scenario = base;
    pt.scenario.links = two_link_layout(d);
    pt.scenario.cs = BernoulliModel::uniform(2, pt.p);
    if (sweep.capture_curve) {
      pt.capture = std::clamp(sweep.capture_curve->at(d), 0.0, 1.0);
      pt.scenario.capture = ProbabilisticCapture::uniform(2, *pt.capture);
    } else {
      pt.scenario.capture = NoCapture{};
    }
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<SojournMetrics> sojourn_runs(const ContentionGraph& g, double p, const SojournConfig& cfg,
                                         const PhyParams& phy, int threads) {
  const auto graph = with_hearing(g, p);
  const auto n = static_cast<std::size_t>(g.size());
  Scenario s;
  s.links = abstract_links(n);
  s.phy = phy;
  BernoulliModel cs;
  cs.n = n;
  cs.p.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) cs.p[i * n + j] = graph.hearing(static_cast<int>(i), static_cast<int>(j));
  s.cs = std::move(cs);
  s.capture = PerfectCapture{};
  s.duration_slots = cfg.duration_slots > 0 ? cfg.duration_slots : slots_for_seconds(phy, 60.0);
  s.trace = TraceLevel::Transmissions;
  s.seed = cfg.seed;
  validate(s);
  std::vector<SojournMetrics> out(static_cast<std::size_t>(cfg.seeds));
  parallel_for(out.size(), threads, [&](std::size_t k) {
    Scenario sk = s;
    sk.seed = cfg.seed + k;
    out[k] = sojourn_metrics(run(sk).trace, graph);
  });
  return out;
}

int cmd_simulate(const Config& cfg, const RunOptions& opt, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (!cfg.scenario) throw ConfigError("simulate needs a scenario section");
    Scenario s = cfg.scenario->scenario;
    if (opt.seed) s.seed = *opt.seed;
    const auto runs = run_repetitions(s, cfg.scenario->repetitions, opt.threads);
    std::filesystem::create_directories(opt.out_dir);

    CsvFile per_run(opt.out_dir / "runs.csv", opt, "run,seed,link_id,throughput_mbps,plr,attempts_per_s,n_tx");
    for (std::size_t k = 0; k < runs.size(); ++k)
      for (std::size_t i = 0; i < runs[k].report.links.size(); ++i) {
        const auto row = report_row(runs[k].report, i);
        per_run.row("{},{},{},{:.6g},{},{:.6g},{}", k, s.seed + k, row.link_id, row.throughput_mbps,
                    opt_value(row.plr), row.attempts_per_s, row.attempts);
      }

    CsvFile agg(opt.out_dir / "aggregate.csv", opt,
                "link_id,throughput_mbps_mean,throughput_mbps_sd,plr_mean,plr_sd,attempts_per_s_mean,"
                "attempts_per_s_sd,runs");
    const auto rows = aggregate(runs);
    for (const auto& r : rows)
      agg.row("{},{},{},{},{}", r.link_id, metric(r.throughput_mbps), metric(r.plr), metric(r.attempts_per_s),
              runs.size());

    const auto bands = full_cs_bands(s.phy, 3);
    CsvFile band_csv(opt.out_dir / "bands.csv", opt,
                     "link_id,band0_fraction,band1_fraction,band2_fraction,out_of_band_fraction,samples");
    for (std::size_t i = 0; i < runs.front().report.links.size(); ++i) {
      CountdownHistogram h;
      for (const auto& r : runs) h.merge(interarrival_to_countdown(r.report.links[i], s.phy));
      const int id = runs.front().report.links[i].link_id;
      write_histogram(opt.out_dir / fmt::format("countdown_link{}.csv", id), opt, h);
      const auto b = band_occupancy(h, bands);
      band_csv.row("{},{:.6g},{:.6g},{:.6g},{:.6g},{}", id, b.fraction[0], b.fraction[1], b.fraction[2],
                   b.out_of_band, h.total);
    }

    if (s.trace != TraceLevel::None)
      for (std::size_t k = 0; k < runs.size(); ++k) {
        std::ostringstream body;
        write_trace_csv(body, runs[k].trace);
        write_text(opt.out_dir / fmt::format("trace_run{}.csv", k), opt, body.str());
      }

    for (const auto& r : rows)
      fmt::print(log, "link {}: {:.3f} +- {:.3f} Mbps, plr {}, {:.1f} attempts/s\n", r.link_id,
                 r.throughput_mbps.mean, r.throughput_mbps.sd,
                 r.plr.n ? fmt::format("{:.2f}%", 100.0 * r.plr.mean) : std::string("n/a"),
                 r.attempts_per_s.mean);
    return 0;
  });
}

int cmd_analyze(const Config& cfg, const RunOptions& opt, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (!cfg.analysis) throw ConfigError("analyze needs an analysis section");
    const auto& a = *cfg.analysis;
    std::filesystem::create_directories(opt.out_dir);
    const auto& ops = a.operations;
    auto wants = [&](const char* op) { return std::find(ops.begin(), ops.end(), op) != ops.end(); };
    const int n = a.graph.size();

    if (wants("mis")) {
      const auto mis = maximum_independent_sets(a.graph, a.cap);
      CsvFile sets(opt.out_dir / "mis.csv", opt, "index,links,size");
      for (std::size_t k = 0; k < mis.size(); ++k)
        sets.row("{},\"{}\",{}", k, format_link_set(mis[k]), std::popcount(mis[k]));
      const auto thr = mis_throughput(a.graph, a.cap);
      CsvFile t(opt.out_dir / "mis_throughput.csv", opt, "link,numerator,denominator,normalized_throughput");
      std::string summary;
      for (int i = 0; i < n; ++i) {
        t.row("{},{},{},{:.6g}", i + 1, thr[i].num, thr[i].den, thr[i].value());
        summary += fmt::format("{}{}/{}", i ? " " : "", thr[i].num, thr[i].den);
      }
      fmt::print(log, "{} maximum independent sets; MIS throughput [{}]\n", mis.size(), summary);
    }
    if (wants("stationary")) {
      const auto st = stationary_distribution(a.graph, a.intensity, a.cap);
      CsvFile t(opt.out_dir / "stationary.csv", opt, "link,normalized_throughput");
      for (int i = 0; i < n; ++i) t.row("{},{:.6g}", i + 1, st.throughput[i]);
      CsvFile d(opt.out_dir / "stationary_states.csv", opt, "links,probability");
      for (std::size_t k = 0; k < st.sets.size(); ++k) d.row("\"{}\",{:.6g}", format_link_set(st.sets[k]), st.probability[k]);
    }
    if (wants("partial")) {
      const auto g = a.hearing_p ? with_hearing(a.graph, *a.hearing_p) : a.graph;
      PartialMethod m = a.partial;
      if (opt.seed) std::visit([&](auto& x) { x.seed = *opt.seed; }, m);
      const auto est = partial_throughput(g, m, a.cap);
      CsvFile t(opt.out_dir / "partial_throughput.csv", opt, "link,normalized_throughput,half_width_95,samples");
      std::string summary;
      for (int i = 0; i < n; ++i) {
        t.row("{},{:.6g},{:.6g},{}", i + 1, est.mean[i], est.half_width[i], est.samples);
        summary += fmt::format("{}{:.3f}", i ? " " : "", est.mean[i]);
      }
      fmt::print(log, "partial-sensing throughput [{}]\n", summary);
    }
    if (wants("escape")) {
      const auto esc = mis_escape_probabilities(a.graph, a.escape->mis, a.escape->p);
      CsvFile t(opt.out_dir / "escape.csv", opt, "link,active_neighbors,activation_probability,freeze_probability");
      for (const auto& e : esc) t.row("{},{},{:.6g},{:.6g}", e.link + 1, e.active_neighbors, e.activation, e.freeze);
    }
    if (wants("sojourn")) {
      SojournConfig sc = a.sojourn;
      if (opt.seed) sc.seed = *opt.seed;
      CsvFile runs(opt.out_dir / "sojourn_runs.csv", opt,
                   "p,seed,sojourns,mean_sojourn_slots,median_sojourn_slots,transitions");
      CsvFile summary(opt.out_dir / "sojourn_summary.csv", opt,
                      "p,median_of_median_sojourn_slots,median_transitions,seeds");
      for (double p : sc.p_values) {
        const auto res = sojourn_runs(a.graph, p, sc, a.phy, opt.threads);
        std::vector<double> med, tr;
        for (std::size_t k = 0; k < res.size(); ++k) {
          runs.row("{:.6g},{},{},{:.6g},{:.6g},{}", p, sc.seed + k, res[k].sojourn_count, res[k].mean_sojourn_slots,
                   res[k].median_sojourn_slots, res[k].transitions);
          med.push_back(res[k].median_sojourn_slots);
          tr.push_back(static_cast<double>(res[k].transitions));
        }
        summary.row("{:.6g},{:.6g},{:.6g},{}", p, median(med), median(tr), res.size());
        fmt::print(log, "p={:.3g}: median sojourn {:.1f} slots, median transitions {:.0f}\n", p, median(med), median(tr));
      }
    }
    if (wants("clique")) {
      const bool ok = clique_feasible(a.graph, a.clique->links, a.clique->airtimes);
      double sum = 0.0;
      for (int i : a.clique->links) sum += a.clique->airtimes[i];
      CsvFile t(opt.out_dir / "clique.csv", opt, "airtime_sum,feasible");
      t.row("{:.6g},{}", sum, ok ? "true" : "false");
      fmt::print(log, "clique airtime sum {:.4g}: {}\n", sum, ok ? "feasible" : "infeasible");
    }
    return 0;
  });
}

int cmd_calibrate(const Config& cfg, const RunOptions& opt, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (!cfg.calibration) throw ConfigError("calibrate needs a calibration section");
    const auto& c = *cfg.calibration;
    FitOptions fo = c.fit;
    if (opt.seed) fo.seed = *opt.seed;
    if (opt.threads > 0) fo.threads = opt.threads;
    std::filesystem::create_directories(opt.out_dir);

    if (c.distance) {
      const auto curve = fit_distance_curve(c.distance->rows, c.distance->isolated_rate, c.distance->full_cs_rate);
      CsvFile t(opt.out_dir / "p_curve.csv", opt, "distance_m,p");
      for (const auto& k : curve.knots()) {
        t.row("{:.6g},{:.6g}", k.distance_m, k.value);
        log << fmt::format("d={:g} m: p={:.3f}\n", k.distance_m, k.value);
      }
    }
    if (!c.target && !c.self_target) return 0;

    CountdownHistogram target;
    if (c.self_target) {
      target = simulate_pqr_histogram(*c.self_target, fo, c.self_target_slots, c.self_target_seed);
    } else {
      std::ifstream in(*c.target);
      if (!in) throw std::runtime_error("cannot open target " + c.target->string());
      try {
        if (c.target_is_timestamps) {
          const auto ts = read_timestamps_csv(in);
          target = countdown_from_timestamps(ts, fo.phy);
        } else {
          target = read_histogram_csv(in);
        }
      } catch (const std::exception& e) {
        throw std::runtime_error(c.target->string() + ": " + e.what());
      }
      if (target.empty()) throw std::runtime_error(c.target->string() + ": no countdown samples");
    }

    const auto fit = fit_pqr(target, c.grid, fo);
    std::ostringstream report;
    write_fit_report(report, fit);
    const auto bands = full_cs_bands(fo.phy, 3);
    const auto fb = band_occupancy(fit.fitted, bands);
    const auto tb = band_occupancy(target, bands);
    report << fmt::format("target_bands: {:.6g} {:.6g} {:.6g}\n", tb.fraction[0], tb.fraction[1], tb.fraction[2])
           << fmt::format("fitted_bands: {:.6g} {:.6g} {:.6g}\n", fb.fraction[0], fb.fraction[1], fb.fraction[2]);
    write_text(opt.out_dir / "fit.txt", opt, report.str());

    CsvFile cmp(opt.out_dir / "fit_vs_target.csv", opt, "slot,target_fraction,fitted_fraction");
    const auto len = std::max(target.counts.size(), fit.fitted.counts.size());
    for (std::size_t s = 0; s < len; ++s) {
      const auto k = static_cast<std::int64_t>(s);
      if (target.fraction(k) == 0.0 && fit.fitted.fraction(k) == 0.0) continue;
      cmp.row("{},{:.6g},{:.6g}", s, target.fraction(k), fit.fitted.fraction(k));
    }
    CsvFile ev(opt.out_dir / "evaluations.csv", opt, "pass,p,q,r,objective_tv");
    for (const auto& e : fit.evaluations) ev.row("{},{:.6g},{:.6g},{:.6g},{:.6g}", e.pass, e.p, e.q, e.r, e.objective);
    fmt::print(log, "fit p={:.3g} q={:.3g} r={:.3g} (tv {:.4f}, {} candidates)\n", fit.p, fit.q, fit.r, fit.objective,
               fit.evaluations.size());
    return 0;
  });
}

int cmd_sweep(const Config& cfg, const RunOptions& opt, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (!cfg.sweep) throw ConfigError("sweep needs a sweep section");
    if (!cfg.scenario) throw ConfigError("sweep needs a scenario section for phy, duration, seed and repetitions");
    Scenario base = cfg.scenario->scenario;
    if (opt.seed) base.seed = *opt.seed;
    const auto points = expand_sweep(base, *cfg.sweep);
    const int reps = cfg.scenario->repetitions;
    std::vector<std::vector<SimResult>> results(points.size());
    parallel_for(points.size(), opt.threads, [&](std::size_t k) {
      results[k] = run_repetitions(points[k].scenario, reps, 1);
    });
    std::filesystem::create_directories(opt.out_dir);
    CsvFile t(opt.out_dir / "sweep.csv", opt,
              "distance_m,p,capture_probability,link_id,throughput_mbps_mean,throughput_mbps_sd,plr_mean,plr_sd,"
              "attempts_per_s_mean,attempts_per_s_sd,runs");
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto rows = aggregate(results[k]);
      for (const auto& r : rows)
        t.row("{:.6g},{:.6g},{},{},{},{},{},{}", points[k].distance_m, points[k].p, opt_value(points[k].capture),
              r.link_id, metric(r.throughput_mbps), metric(r.plr), metric(r.attempts_per_s), reps);
      fmt::print(log, "d={:g} m: p={:.3f} link {} {:.2f} Mbps\n", points[k].distance_m, points[k].p, rows[0].link_id,
                 rows[0].throughput_mbps.mean);
    }
    return 0;
  });
}

}  // namespace pcs
