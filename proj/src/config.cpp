#include "pcs/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "pcs/stats.hpp"

namespace pcs {

ConfigError::ConfigError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                        ": " + what
                                  : what),
      line_(line),
      column_(column) {}

namespace {

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) {
  const auto m = n.Mark();
  if (m.is_null()) throw ConfigError(what);
  throw ConfigError(what, m.line + 1, m.column + 1);
}

void require_map(const YAML::Node& n, const std::string& what) {
  if (!n.IsMap()) fail(n, what + " must be a mapping");
}

void only_keys(const YAML::Node& n, const std::string& section, std::initializer_list<const char*> allowed) {
  require_map(n, section);
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(kv.first, "unknown key '" + key + "' in " + section);
  }
}

template <class T>
T get(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, "bad value '" + n.Scalar() + "' for " + what);
  }
}

template <class T>
T get_or(const YAML::Node& parent, const char* key, T fallback) {
  const auto n = parent[key];
  return n ? get<T>(n, key) : fallback;
}

double probability(const YAML::Node& n, const std::string& what) {
  const double v = get<double>(n, what);
  if (!(v >= 0.0 && v <= 1.0)) fail(n, what + " must lie in [0, 1]");
  return v;
}

template <class T>
std::vector<T> get_list(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence()) fail(n, what + " must be a list");
  std::vector<T> out;
  for (const auto& e : n) out.push_back(get<T>(e, what + " entry"));
  return out;
}

std::int64_t positive_slots(const YAML::Node& n, const std::string& what) {
  const auto v = get<std::int64_t>(n, what);
  if (v <= 0) fail(n, what + " must be positive");
  return v;
}

/// duration_s or duration_slots under `parent`; 0 when neither is present.
std::int64_t duration(const YAML::Node& parent, const PhyParams& phy) {
  const auto s = parent["duration_s"];
  const auto k = parent["duration_slots"];
  if (s && k) fail(k, "give either duration_s or duration_slots, not both");
  if (k) return positive_slots(k, "duration_slots");
  if (s) {
    const double v = get<double>(s, "duration_s");
    if (!(v > 0.0)) fail(s, "duration_s must be positive");
    return slots_for_seconds(phy, v);
  }
  return 0;
}

Position position(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() != 2) fail(n, what + " must be [x, y] in meters");
  return {get<double>(n[0], what), get<double>(n[1], what)};
}

PhyParams parse_phy(const YAML::Node& n) {
  if (!n) return default_80211a();
  if (n.IsScalar()) {
    const auto name = n.as<std::string>();
    if (auto p = phy_preset(name)) return *p;
    fail(n, "unknown phy preset '" + name + "'");
  }
  only_keys(n, "phy",
            {"preset", "ofdm", "packet_us", "sifs_us", "ack_us", "difs_us", "slot_us", "cw_min", "cw_max",
             "payload_bytes"});
  PhyParams phy = default_80211a();
  if (const auto pr = n["preset"]) {
    auto p = phy_preset(get<std::string>(pr, "preset"));
    if (!p) fail(pr, "unknown phy preset '" + pr.Scalar() + "'");
    phy = *p;
  }
  if (const auto o = n["ofdm"]) {
    only_keys(o, "ofdm", {"payload_bytes", "data_rate_mbps", "basic_rate_mbps"});
    try {
      phy = ofdm_80211a_profile(get_or<int>(o, "payload_bytes", 1460), get_or<int>(o, "data_rate_mbps", 54),
                                get_or<int>(o, "basic_rate_mbps", 6));
    } catch (const std::invalid_argument& e) {
      fail(o, e.what());
    }
  }
  auto us = [&](const char* key, Nanos& field) {
    if (const auto v = n[key]) field = Nanos(std::llround(get<double>(v, key) * 1000.0));
  };
  us("packet_us", phy.packet_duration);
  us("sifs_us", phy.sifs);
  us("ack_us", phy.ack_duration);
  us("difs_us", phy.difs);
  us("slot_us", phy.slot);
  phy.cw_min = get_or<int>(n, "cw_min", phy.cw_min);
  phy.cw_max = get_or<int>(n, "cw_max", phy.cw_max);
  if (const auto b = n["payload_bytes"]) phy.payload_bits = 8 * get<std::int64_t>(b, "payload_bytes");
  try {
    phy.validate();
  } catch (const std::invalid_argument& e) {
    fail(n, e.what());
  }
  return phy;
}

ContentionGraph parse_graph(const YAML::Node& n, const std::filesystem::path& base) {
  if (n.IsScalar()) {
    const auto path = base / n.as<std::string>();
    std::ifstream in(path);
    if (!in) fail(n, "cannot open graph file " + path.string());
    try {
      return ContentionGraph::parse(in);
    } catch (const std::exception& e) {
      fail(n, path.string() + ": " + e.what());
    }
  }
  only_keys(n, "graph", {"links", "edges", "cycle", "complete"});
  ContentionGraph g;
  if (const auto c = n["cycle"]) g = ContentionGraph::cycle(get<int>(c, "cycle"));
  else if (const auto c = n["complete"]) g = ContentionGraph::complete(get<int>(c, "complete"));
  else if (const auto l = n["links"]) {
    const int count = get<int>(l, "links");
    if (count < 0) fail(l, "links must be >= 0");
    g = ContentionGraph(count);
  } else
    fail(n, "graph needs links, cycle or complete");
  if (const auto es = n["edges"]) {
    if (!es.IsSequence()) fail(es, "edges must be a list of [i, j] or [i, j, p]");
    for (const auto& e : es) {
      if (!e.IsSequence() || e.size() < 2 || e.size() > 3) fail(e, "edge must be [i, j] or [i, j, p]");
      const int a = get<int>(e[0], "edge link"), b = get<int>(e[1], "edge link");
      if (a < 1 || b < 1 || a > g.size() || b > g.size()) fail(e, "edge link number out of range");
      if (a == b) fail(e, "self-loop");
      g.add_edge(a - 1, b - 1, e.size() == 3 ? probability(e[2], "edge probability") : 1.0);
    }
  }
  return g;
}

DistanceCurve parse_curve(const YAML::Node& n, const std::string& what, const DistanceCurve& fallback) {
  if (n.IsScalar()) {
    if (n.Scalar() == "default") return fallback;
    fail(n, what + " must be 'default' or a list of [distance_m, value] knots");
  }
  if (!n.IsSequence() || n.size() == 0) fail(n, what + " must be a non-empty list of knots");
  std::vector<CurveKnot> knots;
  for (const auto& k : n) {
    if (!k.IsSequence() || k.size() != 2) fail(k, "knot must be [distance_m, value]");
    knots.push_back({get<double>(k[0], "knot distance"), probability(k[1], "knot value")});
  }
  try {
    return DistanceCurve(std::move(knots));
  } catch (const std::invalid_argument& e) {
    fail(n, e.what());
  }
}

DistanceFitConfig parse_distance_fit(const YAML::Node& n) {
  only_keys(n, "attempts curve", {"rows", "isolated_rate", "full_cs_rate"});
  DistanceFitConfig d;
  const auto rows = n["rows"];
  if (!rows || !rows.IsSequence()) fail(n, "rows must be a list of [distance_m, attempts_per_s]");
  for (const auto& r : rows) {
    if (!r.IsSequence() || r.size() != 2) fail(r, "row must be [distance_m, attempts_per_s]");
    d.rows.push_back({get<double>(r[0], "distance"), get<double>(r[1], "attempts_per_s")});
  }
  if (!n["isolated_rate"] || !n["full_cs_rate"]) fail(n, "isolated_rate and full_cs_rate are required");
  d.isolated_rate = get<double>(n["isolated_rate"], "isolated_rate");
  d.full_cs_rate = get<double>(n["full_cs_rate"], "full_cs_rate");
  return d;
}

std::vector<LinkSpec> parse_links(const YAML::Node& sc) {
  const auto links = sc["links"];
  const auto sep = sc["separation_m"];
  if (links && sep) fail(sep, "give either links or separation_m, not both");
  if (sep) {
    const double d = get<double>(sep, "separation_m");
    if (!(d >= 0.0)) fail(sep, "separation_m must be >= 0");
    return two_link_layout(d);
  }
  if (!links) fail(sc, "scenario needs links or separation_m");
  if (links.IsScalar()) {
    const int n = get<int>(links, "links");
    if (n < 1) fail(links, "links must be >= 1");
    return abstract_links(static_cast<std::size_t>(n));
  }
  if (!links.IsSequence()) fail(links, "links must be a count or a list");
  std::vector<LinkSpec> out;
  for (const auto& l : links) {
    only_keys(l, "link", {"id", "sender", "receiver"});
    LinkSpec s;
    s.id = get_or<int>(l, "id", static_cast<int>(out.size()) + 1);
    if (!l["sender"] || !l["receiver"]) fail(l, "link needs sender and receiver");
    s.sender = position(l["sender"], "sender");
    s.receiver = position(l["receiver"], "receiver");
    out.push_back(s);
  }
  return out;
}

CsModel parse_cs(const YAML::Node& n, std::size_t links, const std::filesystem::path& base) {
  if (!n) return Graph01Model::complete(links);
  require_map(n, "cs");
  const auto model = get<std::string>(n["model"] ? n["model"] : n, "cs model");
  auto graph_to_links = [&](const ContentionGraph& g, const YAML::Node& where) {
    if (static_cast<std::size_t>(g.size()) != links)
      fail(where, "graph has " + std::to_string(g.size()) + " links but the scenario has " + std::to_string(links));
  };
  if (model == "graph01") {
    only_keys(n, "cs", {"model", "graph", "complete"});
    if (const auto g = n["graph"]) {
      const auto cg = parse_graph(g, base);
      graph_to_links(cg, g);
      std::vector<std::pair<std::size_t, std::size_t>> e;
      for (auto [a, b] : cg.edges()) e.emplace_back(a, b);
      return Graph01Model::from_edges(links, e);
    }
    if (get_or<bool>(n, "complete", true)) return Graph01Model::complete(links);
    return Graph01Model::from_edges(links, {});
  }
  if (model == "csrange") {
    only_keys(n, "cs", {"model", "cs_range_m"});
    CsRangeModel m;
    m.cs_range_m = get_or<double>(n, "cs_range_m", m.cs_range_m);
    if (!(m.cs_range_m > 0.0)) fail(n["cs_range_m"], "cs_range_m must be positive");
    return m;
  }
  if (model == "bernoulli") {
    only_keys(n, "cs", {"model", "p", "graph"});
    if (n["p"] && n["graph"]) fail(n["graph"], "give either p or graph, not both");
    if (const auto g = n["graph"]) {
      const auto cg = parse_graph(g, base);
      graph_to_links(cg, g);
      BernoulliModel m;
      m.n = links;
      m.p.assign(links * links, 0.0);
      for (std::size_t i = 0; i < links; ++i)
        for (std::size_t j = 0; j < links; ++j)
          if (i != j) m.p[i * links + j] = cg.hearing(static_cast<int>(i), static_cast<int>(j));
      return m;
    }
    if (!n["p"]) fail(n, "bernoulli model needs p or graph");
    return BernoulliModel::uniform(links, probability(n["p"], "p"));
  }
  if (model == "detailed") {
    only_keys(n, "cs", {"model", "p", "q", "r", "tracking_slots", "p_high"});
    DetailedPqrModel m;
    if (n["p"]) m.p = probability(n["p"], "p");
    if (n["q"]) m.q = probability(n["q"], "q");
    if (n["r"]) m.r = probability(n["r"], "r");
    if (n["p_high"]) m.p_high = probability(n["p_high"], "p_high");
    m.tracking_slots = get_or<int>(n, "tracking_slots", m.tracking_slots);
    if (m.tracking_slots != 4 && m.tracking_slots != 5) fail(n["tracking_slots"], "tracking_slots must be 4 or 5");
    return m;
  }
  fail(n["model"] ? n["model"] : n, "unknown cs model '" + model + "' (graph01, csrange, bernoulli, detailed)");
}

CaptureModel parse_capture(const YAML::Node& n, std::size_t links) {
  if (!n) return NoCapture{};
  if (n.IsScalar()) {
    const auto s = n.Scalar();
    if (s == "none") return NoCapture{};
    if (s == "perfect") return PerfectCapture{};
    fail(n, "unknown capture model '" + s + "'");
  }
  only_keys(n, "capture", {"model", "c"});
  const auto model = get<std::string>(n["model"] ? n["model"] : n, "capture model");
  if (model == "none") return NoCapture{};
  if (model == "perfect") return PerfectCapture{};
  if (model == "probabilistic") {
    if (!n["c"]) fail(n, "probabilistic capture needs c");
    return ProbabilisticCapture::uniform(links, probability(n["c"], "c"));
  }
  fail(n["model"], "unknown capture model '" + model + "' (none, perfect, probabilistic)");
}

ScenarioConfig parse_scenario(const YAML::Node& n, const std::filesystem::path& base) {
  only_keys(n, "scenario",
            {"phy", "links", "separation_m", "cs", "capture", "duration_s", "duration_slots", "seed", "repetitions",
             "exponential_backoff", "trace"});
  ScenarioConfig c;
  Scenario& s = c.scenario;
  s.phy = parse_phy(n["phy"]);
  s.links = parse_links(n);
  s.cs = parse_cs(n["cs"], s.links.size(), base);
  s.capture = parse_capture(n["capture"], s.links.size());
  s.duration_slots = duration(n, s.phy);
  if (!n["duration_s"] && !n["duration_slots"]) fail(n, "scenario needs duration_s or duration_slots");
  s.seed = get_or<std::uint64_t>(n, "seed", 1);
  s.exponential_backoff = get_or<bool>(n, "exponential_backoff", false);
  if (const auto t = n["trace"]) {
    const auto v = get<std::string>(t, "trace");
    if (v == "none") s.trace = TraceLevel::None;
    else if (v == "transmissions") s.trace = TraceLevel::Transmissions;
    else if (v == "freezes") s.trace = TraceLevel::Freezes;
    else fail(t, "trace must be none, transmissions or freezes");
  } else {
    s.trace = TraceLevel::None;
  }
  c.repetitions = get_or<int>(n, "repetitions", 1);
  if (c.repetitions < 1) fail(n["repetitions"], "repetitions must be >= 1");
  try {
    validate(s);
  } catch (const ScenarioError& e) {
    fail(n, e.what());
  }
  return c;
}

LinkSet parse_link_set(const YAML::Node& n, int size, const std::string& what) {
  LinkSet s = 0;
  for (int v : get_list<int>(n, what)) {
    if (v < 1 || v > size) fail(n, what + ": link " + std::to_string(v) + " out of range");
    s |= LinkSet{1} << (v - 1);
  }
  return s;
}

AnalysisConfig parse_analysis(const YAML::Node& n, const std::filesystem::path& base) {
  only_keys(n, "analysis",
            {"graph", "operations", "intensity", "cap", "partial", "hearing_p", "escape", "sojourn", "clique", "phy"});
  AnalysisConfig a;
  if (!n["graph"]) fail(n, "analysis needs a graph");
  a.graph = parse_graph(n["graph"], base);
  a.phy = parse_phy(n["phy"]);
  static const std::set<std::string> known{"mis", "stationary", "partial", "escape", "sojourn", "clique"};
  if (const auto ops = n["operations"]) {
    a.operations = get_list<std::string>(ops, "operations");
    for (const auto& o : a.operations)
      if (!known.count(o)) fail(ops, "unknown operation '" + o + "' (mis, stationary, partial, escape, sojourn, clique)");
  } else {
    a.operations = {"mis"};
  }
  a.intensity = get_or<double>(n, "intensity", 1.0);
  if (!(a.intensity >= 0.0)) fail(n["intensity"], "intensity must be >= 0");
  a.cap = get_or<int>(n, "cap", a.cap);
  if (a.cap < 1 || a.cap > 31) fail(n["cap"], "cap must lie in [1, 31]");
  if (n["hearing_p"]) a.hearing_p = probability(n["hearing_p"], "hearing_p");

  if (const auto p = n["partial"]) {
    only_keys(p, "partial", {"method", "samples", "seed", "exact", "repetitions", "duration_s", "duration_slots", "capture"});
    const auto method = get_or<std::string>(p, "method", "realization");
    if (method == "realization") {
      EdgeRealization er;
      er.samples = get_or<std::int64_t>(p, "samples", er.samples);
      er.seed = get_or<std::uint64_t>(p, "seed", er.seed);
      er.exact = get_or<bool>(p, "exact", false);
      if (er.samples < 1) fail(p["samples"], "samples must be >= 1");
      a.partial = er;
    } else if (method == "simulation") {
      SimDelegate sd;
      sd.phy = a.phy;
      sd.repetitions = get_or<int>(p, "repetitions", sd.repetitions);
      if (sd.repetitions < 1) fail(p["repetitions"], "repetitions must be >= 1");
      sd.seed = get_or<std::uint64_t>(p, "seed", sd.seed);
      sd.duration_slots = duration(p, sd.phy);
      if (p["capture"]) sd.capture = parse_capture(p["capture"], static_cast<std::size_t>(a.graph.size()));
      a.partial = sd;
    } else {
      fail(p["method"], "partial method must be realization or simulation");
    }
  }
  if (const auto e = n["escape"]) {
    only_keys(e, "escape", {"mis", "p"});
    if (!e["mis"]) fail(e, "escape needs mis");
    EscapeConfig ec;
    ec.mis = parse_link_set(e["mis"], a.graph.size(), "escape.mis");
    if (e["p"]) ec.p = probability(e["p"], "p");
    a.escape = ec;
  }
  if (const auto s = n["sojourn"]) {
    only_keys(s, "sojourn", {"p", "seeds", "seed", "duration_s", "duration_slots"});
    if (s["p"]) {
      a.sojourn.p_values.clear();
      if (s["p"].IsSequence())
        for (const auto& v : s["p"]) a.sojourn.p_values.push_back(probability(v, "p"));
      else
        a.sojourn.p_values.push_back(probability(s["p"], "p"));
    }
    a.sojourn.seeds = get_or<int>(s, "seeds", a.sojourn.seeds);
    if (a.sojourn.seeds < 1) fail(s["seeds"], "seeds must be >= 1");
    a.sojourn.seed = get_or<std::uint64_t>(s, "seed", a.sojourn.seed);
    a.sojourn.duration_slots = duration(s, a.phy);
  }
  if (const auto c = n["clique"]) {
    only_keys(c, "clique", {"links", "airtimes"});
    if (!c["links"] || !c["airtimes"]) fail(c, "clique needs links and airtimes");
    CliqueConfig cc;
    for (int v : get_list<int>(c["links"], "clique.links")) {
      if (v < 1 || v > a.graph.size()) fail(c["links"], "clique link out of range");
      cc.links.push_back(v - 1);
    }
    cc.airtimes = get_list<double>(c["airtimes"], "clique.airtimes");
    if (static_cast<int>(cc.airtimes.size()) != a.graph.size())
      fail(c["airtimes"], "airtimes needs one entry per graph link");
    a.clique = cc;
  }
  for (const auto& op : a.operations) {
    if (op == "escape" && !a.escape) fail(n, "operation escape needs an escape section");
    if (op == "clique" && !a.clique) fail(n, "operation clique needs a clique section");
  }
  return a;
}

GridAxis parse_axis(const YAML::Node& n, GridAxis fallback, const std::string& what) {
  if (!n) return fallback;
  only_keys(n, what, {"lo", "hi", "step"});
  GridAxis a = fallback;
  a.lo = n["lo"] ? probability(n["lo"], what + ".lo") : a.lo;
  a.hi = n["hi"] ? probability(n["hi"], what + ".hi") : a.hi;
  a.step = get_or<double>(n, "step", a.step);
  if (a.lo > a.hi) fail(n, what + ": lo > hi");
  if (!(a.step >= 0.0)) fail(n, what + ": step must be >= 0");
  return a;
}

CalibrationConfig parse_calibration(const YAML::Node& n, const std::filesystem::path& base) {
  only_keys(n, "calibration",
            {"target", "target_timestamps", "self_target", "grid", "sim_slots", "coarse_sim_slots", "polish_sim_slots", "seed", "threads",
             "max_candidates", "tracking_slots", "p_high", "capture", "phy", "attempts_curve"});
  CalibrationConfig c;
  c.fit.phy = parse_phy(n["phy"]);
  const int sources = !!n["target"] + !!n["target_timestamps"] + !!n["self_target"];
  if (sources > 1) fail(n, "give only one of target, target_timestamps, self_target");
  if (n["target"]) c.target = base / get<std::string>(n["target"], "target");
  if (n["target_timestamps"]) {
    c.target = base / get<std::string>(n["target_timestamps"], "target_timestamps");
    c.target_is_timestamps = true;
  }
  if (const auto st = n["self_target"]) {
    only_keys(st, "self_target", {"p", "q", "r", "seed", "slots"});
    DetailedPqrModel m;
    if (st["p"]) m.p = probability(st["p"], "p");
    if (st["q"]) m.q = probability(st["q"], "q");
    if (st["r"]) m.r = probability(st["r"], "r");
    c.self_target = m;
    c.self_target_seed = get_or<std::uint64_t>(st, "seed", 0x5e1f);
    if (st["slots"]) c.self_target_slots = positive_slots(st["slots"], "self_target.slots");
  }
  if (const auto g = n["grid"]) {
    only_keys(g, "grid", {"p", "q", "r", "refine", "fine_p_radius", "fine_p_step", "fine_q_radius", "fine_q_step", "fine_all_r", "polish"});
    c.grid.p = parse_axis(g["p"], c.grid.p, "grid.p");
    c.grid.q = parse_axis(g["q"], c.grid.q, "grid.q");
    if (g["r"]) {
      c.grid.r.clear();
      for (const auto& v : g["r"]) c.grid.r.push_back(probability(v, "grid.r"));
      if (c.grid.r.empty()) fail(g["r"], "grid.r must not be empty");
    }
    c.grid.refine = get_or<bool>(g, "refine", c.grid.refine);
    c.grid.fine_p_radius = get_or<double>(g, "fine_p_radius", c.grid.fine_p_radius);
    c.grid.fine_p_step = get_or<double>(g, "fine_p_step", c.grid.fine_p_step);
    c.grid.fine_q_radius = get_or<double>(g, "fine_q_radius", c.grid.fine_q_radius);
    c.grid.fine_q_step = get_or<double>(g, "fine_q_step", c.grid.fine_q_step);
    c.grid.fine_all_r = get_or<bool>(g, "fine_all_r", c.grid.fine_all_r);
    c.grid.polish = get_or<bool>(g, "polish", c.grid.polish);
    try {
      c.grid.validate();
    } catch (const std::invalid_argument& e) {
      fail(g, e.what());
    }
  }
  if (n["sim_slots"]) c.fit.sim_slots = positive_slots(n["sim_slots"], "sim_slots");
  if (n["coarse_sim_slots"]) c.fit.coarse_sim_slots = get<std::int64_t>(n["coarse_sim_slots"], "coarse_sim_slots");
  if (n["polish_sim_slots"]) c.fit.polish_sim_slots = get<std::int64_t>(n["polish_sim_slots"], "polish_sim_slots");
  c.fit.seed = get_or<std::uint64_t>(n, "seed", c.fit.seed);
  c.fit.threads = get_or<int>(n, "threads", c.fit.threads);
  c.fit.max_candidates = get_or<std::int64_t>(n, "max_candidates", c.fit.max_candidates);
  c.fit.tracking_slots = get_or<int>(n, "tracking_slots", c.fit.tracking_slots);
  if (c.fit.tracking_slots != 4 && c.fit.tracking_slots != 5) fail(n["tracking_slots"], "tracking_slots must be 4 or 5");
  if (n["p_high"]) c.fit.p_high = probability(n["p_high"], "p_high");
  c.fit.capture = parse_capture(n["capture"], 2);
  if (n["attempts_curve"]) c.distance = parse_distance_fit(n["attempts_curve"]);
  if (!c.target && !c.self_target && !c.distance) fail(n, "calibration needs target, target_timestamps, self_target or attempts_curve");
  return c;
}

SweepConfig parse_sweep(const YAML::Node& n) {
  only_keys(n, "sweep", {"distance_m", "p_curve", "attempts_curve", "capture_curve"});
  SweepConfig s;
  if (!n["distance_m"]) fail(n, "sweep needs distance_m");
  s.distances_m = get_list<double>(n["distance_m"], "distance_m");
  if (s.distances_m.empty()) fail(n["distance_m"], "distance_m must not be empty");
  for (double d : s.distances_m)
    if (!(d >= 0.0)) fail(n["distance_m"], "distances must be >= 0");
  if (n["p_curve"] && n["attempts_curve"]) fail(n["attempts_curve"], "give either p_curve or attempts_curve");
  if (n["p_curve"]) s.p_curve = parse_curve(n["p_curve"], "p_curve", DistanceCurve::default_p_curve());
  if (const auto ac = n["attempts_curve"]) {
    const auto d = parse_distance_fit(ac);
    try {
      s.p_curve = fit_distance_curve(d.rows, d.isolated_rate, d.full_cs_rate);
    } catch (const std::invalid_argument& e) {
      fail(ac, e.what());
    }
  }
  if (const auto c = n["capture_curve"]) {
    if (c.IsScalar() && c.Scalar() == "none") s.capture_curve.reset();
    else s.capture_curve = parse_curve(c, "capture_curve", default_capture_curve());
  }
  return s;
}

}  // namespace

Config parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root || root.IsNull()) throw ConfigError("empty config");
  only_keys(root, "config", {"scenario", "analysis", "calibration", "sweep"});
  Config c;
  c.base_dir = base_dir;
  try {
    if (root["scenario"]) c.scenario = parse_scenario(root["scenario"], base_dir);
    if (root["analysis"]) c.analysis = parse_analysis(root["analysis"], base_dir);
    if (root["calibration"]) c.calibration = parse_calibration(root["calibration"], base_dir);
    if (root["sweep"]) c.sweep = parse_sweep(root["sweep"]);
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace pcs
