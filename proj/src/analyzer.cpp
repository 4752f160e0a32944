#include "pcs/analyzer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "pcs/random_stream.hpp"

namespace pcs {

namespace {

constexpr LinkSet bit(int i) { return LinkSet{1} << i; }

void require_cap(const ContentionGraph& g, int cap) {
  const int limit = std::min(cap, 31);
  if (g.size() > limit) throw EnumerationCapExceeded(g.size(), limit);
}

double popcount(LinkSet s) { return static_cast<double>(std::popcount(s)); }

struct MeanVar {
  std::vector<double> sum, sumsq;
  explicit MeanVar(std::size_t n) : sum(n, 0.0), sumsq(n, 0.0) {}
  void add(std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum[i] += x[i];
      sumsq[i] += x[i] * x[i];
    }
  }
  ThroughputEstimate finish(std::int64_t n) const {
    ThroughputEstimate e;
    e.samples = n;
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < sum.size(); ++i) {
      const double mean = sum[i] / dn;
      double hw = 0.0;
      if (n > 1) {
        const double var = std::max(0.0, (sumsq[i] - dn * mean * mean) / (dn - 1.0));
        hw = 1.96 * std::sqrt(var / dn);
      }
      e.mean.push_back(mean);
      e.half_width.push_back(hw);
    }
    return e;
  }
};

}  // namespace

EnumerationCapExceeded::EnumerationCapExceeded(int n_links, int cap)
    : std::runtime_error("graph has " + std::to_string(n_links) +
                         " links, above the exact enumeration cap of " + std::to_string(cap) +
                         "; use a Monte-Carlo estimator (simulation) instead"),
      n_links_(n_links),
      cap_(cap) {}

ContentionGraph::ContentionGraph(int n_links) : n_(n_links) {
  if (n_links < 0) throw std::invalid_argument("graph: negative link count");
  p_.assign(static_cast<std::size_t>(n_links) * n_links, 0.0);
}

ContentionGraph ContentionGraph::cycle(int n) {
  ContentionGraph g(n);
  for (int i = 0; i < n && n > 2; ++i) g.add_edge(i, (i + 1) % n);
  if (n == 2) g.add_edge(0, 1);
  return g;
}

ContentionGraph ContentionGraph::complete(int n) {
  ContentionGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

void ContentionGraph::add_edge(int a, int b, double p) {
  if (a < 0 || b < 0 || a >= n_ || b >= n_) throw std::invalid_argument("graph: link out of range");
  if (a == b) throw std::invalid_argument("graph: self-loop");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("graph: hearing probability outside [0, 1]");
  p_[static_cast<std::size_t>(a) * n_ + b] = p;
  p_[static_cast<std::size_t>(b) * n_ + a] = p;
}

bool ContentionGraph::adjacent(int a, int b) const { return hearing(a, b) > 0.0; }

double ContentionGraph::hearing(int a, int b) const {
  return p_[static_cast<std::size_t>(a) * n_ + b];
}

std::vector<std::pair<int, int>> ContentionGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (adjacent(i, j)) out.emplace_back(i, j);
  return out;
}

LinkSet ContentionGraph::neighbors(int a) const {
  if (n_ > 32) throw std::logic_error("graph: neighbor masks need at most 32 links");
  LinkSet m = 0;
  for (int j = 0; j < n_; ++j)
    if (adjacent(a, j)) m |= bit(j);
  return m;
}

bool ContentionGraph::probabilistic() const {
  return std::any_of(p_.begin(), p_.end(), [](double v) { return v > 0.0 && v < 1.0; });
}

ContentionGraph ContentionGraph::parse(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::optional<ContentionGraph> g;
  auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("graph line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string keyword;
    if (!(ls >> keyword)) continue;
    if (keyword == "links") {
      if (g) throw fail("duplicate 'links' header");
      int n = -1;
      if (!(ls >> n) || n < 0) throw fail("expected 'links N' with N >= 0");
      g.emplace(n);
    } else if (keyword == "edge") {
      if (!g) throw fail("'edge' before the 'links N' header");
      int a = 0, b = 0;
      if (!(ls >> a >> b)) throw fail("expected 'edge i j [p]'");
      double p = 1.0;
      if (std::string rest; ls >> rest) {
        std::size_t used = 0;
        try {
          p = std::stod(rest, &used);
        } catch (const std::exception&) {
          throw fail("bad probability '" + rest + "'");
        }
        if (used != rest.size()) throw fail("bad probability '" + rest + "'");
      }
      if (a < 1 || b < 1 || a > g->size() || b > g->size()) throw fail("link number out of range");
      if (a == b) throw fail("self-loop");
      if (!(p >= 0.0 && p <= 1.0)) throw fail("probability outside [0, 1]");
      g->add_edge(a - 1, b - 1, p);
      if (std::string extra; ls >> extra) throw fail("trailing text '" + extra + "'");
    } else {
      throw fail("unknown keyword '" + keyword + "'");
    }
  }
  if (!g) throw std::runtime_error("graph: missing 'links N' header");
  return *g;
}

void ContentionGraph::write(std::ostream& out) const {
  out << "links " << n_ << '\n';
  for (auto [a, b] : edges()) {
    out << "edge " << a + 1 << ' ' << b + 1;
    if (hearing(a, b) < 1.0) out << ' ' << hearing(a, b);
    out << '\n';
  }
}

Fraction Fraction::of(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("fraction: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return {num / (g ? g : 1), den / (g ? g : 1)};
}

bool is_independent(const ContentionGraph& g, LinkSet s) {
  for (int i = 0; i < g.size(); ++i) {
    if (!(s & bit(i))) continue;
    for (int j = i + 1; j < g.size(); ++j)
      if ((s & bit(j)) && g.adjacent(i, j)) return false;
  }
  return true;
}

std::vector<LinkSet> independent_sets(const ContentionGraph& g, int cap) {
  require_cap(g, cap);
  const int n = g.size();
  std::vector<LinkSet> nbr(n);
  for (int i = 0; i < n; ++i) nbr[i] = g.neighbors(i);
  std::vector<LinkSet> out;
  // Depth-first over links in index order; `blocked` holds neighbors of chosen links.
  auto rec = [&](auto&& self, int v, LinkSet cur, LinkSet blocked) -> void {
    if (v == n) {
      out.push_back(cur);
      return;
    }
    self(self, v + 1, cur, blocked);
    if (!(blocked & bit(v))) self(self, v + 1, cur | bit(v), blocked | nbr[v]);
  };
  rec(rec, 0, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LinkSet> maximum_independent_sets(const ContentionGraph& g, int cap) {
  auto all = independent_sets(g, cap);
  int best = 0;
  for (LinkSet s : all) best = std::max(best, std::popcount(s));
  std::erase_if(all, [best](LinkSet s) { return std::popcount(s) != best; });
  return all;
}

std::vector<Fraction> mis_throughput(const ContentionGraph& g, int cap) {
  const auto mis = maximum_independent_sets(g, cap);
  std::vector<Fraction> out;
  for (int i = 0; i < g.size(); ++i) {
    const auto hits = std::count_if(mis.begin(), mis.end(), [i](LinkSet s) { return (s & bit(i)) != 0; });
    out.push_back(Fraction::of(hits, static_cast<std::int64_t>(mis.size())));
  }
  return out;
}

StationaryResult stationary_distribution(const ContentionGraph& g, double intensity, int cap) {
  if (!(intensity >= 0.0) || std::isinf(intensity))
    throw std::invalid_argument("stationary: access intensity must be finite and >= 0");
  StationaryResult res;
  res.sets = independent_sets(g, cap);
  res.probability.resize(res.sets.size());
  if (intensity == 0.0) {
    for (std::size_t k = 0; k < res.sets.size(); ++k) res.probability[k] = res.sets[k] == 0 ? 1.0 : 0.0;
  } else {
    double max_size = 0.0;
    for (LinkSet s : res.sets) max_size = std::max(max_size, popcount(s));
    const double log_rho = std::log(intensity);
    double total = 0.0;
    for (std::size_t k = 0; k < res.sets.size(); ++k) {
      res.probability[k] = std::exp((popcount(res.sets[k]) - max_size) * log_rho);
      total += res.probability[k];
    }
    for (double& v : res.probability) v /= total;
  }
  res.throughput.assign(g.size(), 0.0);
  for (std::size_t k = 0; k < res.sets.size(); ++k)
    for (int i = 0; i < g.size(); ++i)
      if (res.sets[k] & bit(i)) res.throughput[i] += res.probability[k];
  return res;
}

std::vector<double> stationary_throughput(const ContentionGraph& g, double intensity, int cap) {
  return stationary_distribution(g, intensity, cap).throughput;
}

namespace {

std::vector<double> to_doubles(const std::vector<Fraction>& f) {
  std::vector<double> out;
  for (const auto& x : f) out.push_back(x.value());
  return out;
}

ThroughputEstimate edge_realization(const ContentionGraph& g, const EdgeRealization& m, int cap) {
  require_cap(g, cap);
  const auto all_edges = g.edges();
  std::vector<std::pair<int, int>> fixed, random;
  for (auto e : all_edges) (g.hearing(e.first, e.second) >= 1.0 ? fixed : random).push_back(e);

  auto realize = [&](auto&& present) {
    ContentionGraph r(g.size());
    for (auto [a, b] : fixed) r.add_edge(a, b);
    for (std::size_t k = 0; k < random.size(); ++k)
      if (present(k)) r.add_edge(random[k].first, random[k].second);
    return to_doubles(mis_throughput(r, cap));
  };

  if (random.empty()) {
    auto est = MeanVar(g.size());
    const auto x = realize([](std::size_t) { return false; });
    est.add(x);
    auto e = est.finish(1);
    e.samples = m.exact ? 1 : std::max<std::int64_t>(m.samples, 1);
    return e;
  }

  if (m.exact) {
    if (random.size() > 20)
      throw std::invalid_argument("edge realization: exact mode supports at most 20 probabilistic edges");
    ThroughputEstimate e;
    e.mean.assign(g.size(), 0.0);
    e.half_width.assign(g.size(), 0.0);
    const std::uint32_t combos = 1u << random.size();
    for (std::uint32_t mask = 0; mask < combos; ++mask) {
      double w = 1.0;
      for (std::size_t k = 0; k < random.size(); ++k) {
        const double p = g.hearing(random[k].first, random[k].second);
        w *= (mask >> k) & 1u ? p : 1.0 - p;
      }
      const auto x = realize([mask](std::size_t k) { return ((mask >> k) & 1u) != 0; });
      for (int i = 0; i < g.size(); ++i) e.mean[i] += w * x[i];
    }
    e.samples = combos;
    return e;
  }

  if (m.samples < 1) throw std::invalid_argument("edge realization: need at least one sample");
  RandomStream rng(m.seed, 0, StreamPurpose::Sampling);
  MeanVar acc(g.size());
  std::vector<std::uint8_t> present(random.size());
  for (std::int64_t s = 0; s < m.samples; ++s) {
    for (std::size_t k = 0; k < random.size(); ++k)
      present[k] = rng.bernoulli(g.hearing(random[k].first, random[k].second));
    acc.add(realize([&](std::size_t k) { return present[k] != 0; }));
  }
  return acc.finish(m.samples);
}

ThroughputEstimate sim_delegate(const ContentionGraph& g, const SimDelegate& m) {
  if (m.repetitions < 1) throw std::invalid_argument("sim delegate: need at least one repetition");
  const auto n = static_cast<std::size_t>(g.size());
  Scenario s;
  s.links = abstract_links(n);
  s.phy = m.phy;
  BernoulliModel cs;
  cs.n = n;
  cs.p.assign(n * n, 0.0);
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j)
      if (i != j) cs.p[i * n + j] = g.hearing(i, j);
  s.cs = std::move(cs);
  s.capture = m.capture;
  s.duration_slots = m.duration_slots > 0 ? m.duration_slots : slots_for_seconds(m.phy, 60.0);
  s.trace = TraceLevel::None;
  const double isolated = closed_form_throughput(ClosedFormKind::Isolated, m.phy);

  MeanVar acc(n);
  std::vector<double> x(n);
  for (int k = 0; k < m.repetitions; ++k) {
    s.seed = m.seed + static_cast<std::uint64_t>(k);
    const auto res = run(s);
    for (std::size_t i = 0; i < n; ++i) x[i] = res.report.links[i].throughput_bps / isolated;
    acc.add(x);
  }
  return acc.finish(m.repetitions);
}

}  // namespace

ThroughputEstimate partial_throughput(const ContentionGraph& g, const PartialMethod& method, int cap) {
  if (const auto* er = std::get_if<EdgeRealization>(&method)) return edge_realization(g, *er, cap);
  return sim_delegate(g, std::get<SimDelegate>(method));
}

std::vector<EscapeProbability> mis_escape_probabilities(const ContentionGraph& g, LinkSet current_mis,
                                                        double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("escape: p outside [0, 1]");
  const auto mis = maximum_independent_sets(g);
  if (std::find(mis.begin(), mis.end(), current_mis) == mis.end())
    throw std::invalid_argument("escape: " + format_link_set(current_mis) +
                                " is not a maximum independent set");
  std::vector<EscapeProbability> out;
  for (int i = 0; i < g.size(); ++i) {
    if (current_mis & bit(i)) continue;
    const int m = std::popcount(g.neighbors(i) & current_mis);
    const double act = std::pow(1.0 - p, m);
    out.push_back({i, m, act, 1.0 - act});
  }
  return out;
}

SojournMetrics sojourn_metrics(const SimTrace& trace, const ContentionGraph& g, int cap) {
  if (static_cast<int>(trace.n_links) != g.size())
    throw std::invalid_argument("sojourn: trace has " + std::to_string(trace.n_links) +
                                " links but the graph has " + std::to_string(g.size()));
  const auto mis = maximum_independent_sets(g, cap);

  // Change points of the transmitting set.
  std::vector<std::pair<std::int64_t, std::pair<int, int>>> deltas;  // slot, (link, +1/-1)
  for (const auto& e : trace.events) {
    if (e.kind != TraceEventKind::TxStart) continue;
    if (static_cast<int>(e.link) >= g.size()) throw std::invalid_argument("sojourn: trace link outside graph");
    deltas.push_back({e.slot, {static_cast<int>(e.link), +1}});
    deltas.push_back({e.slot + trace.tx_slots, {static_cast<int>(e.link), -1}});
  }
  std::stable_sort(deltas.begin(), deltas.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  SojournMetrics out;
  std::vector<std::int64_t> occupied(mis.size(), 0), count(mis.size(), 0);
  std::vector<std::int64_t> lengths;
  std::optional<std::size_t> label, last_label;
  std::int64_t run_len = 0;

  auto close = [&] {
    if (label) lengths.push_back(run_len);
    label.reset();
    run_len = 0;
  };
  auto consume = [&](LinkSet s, std::int64_t len) {
    if (len <= 0) return;
    if (label && (s & ~mis[*label]) == 0) {
      run_len += len;
      if (s) occupied[*label] += len;
      return;
    }
    close();
    if (s == 0) return;
    for (std::size_t k = 0; k < mis.size(); ++k) {
      if ((s & ~mis[k]) != 0) continue;
      if (last_label && *last_label != k) ++out.transitions;
      label = last_label = k;
      run_len = len;
      occupied[k] += len;
      ++count[k];
      return;
    }
  };

  LinkSet current = 0;
  std::int64_t cursor = 0;
  const std::int64_t end = trace.duration_slots;
  for (std::size_t k = 0; k < deltas.size();) {
    const std::int64_t at = std::min(deltas[k].first, end);
    consume(current, at - cursor);
    cursor = at;
    if (cursor >= end) break;
    const std::int64_t slot = deltas[k].first;
    for (; k < deltas.size() && deltas[k].first == slot; ++k) {
      const auto [link, d] = deltas[k].second;
      if (d > 0) current |= bit(link);
      else current &= ~bit(link);
    }
  }
  consume(current, end - cursor);
  close();

  const double total = static_cast<double>(std::max<std::int64_t>(end, 1));
  for (std::size_t k = 0; k < mis.size(); ++k)
    out.per_mis.push_back({mis[k], static_cast<double>(occupied[k]) / total, count[k]});
  out.sojourn_count = static_cast<std::int64_t>(lengths.size());
  if (!lengths.empty()) {
    out.mean_sojourn_slots =
        std::accumulate(lengths.begin(), lengths.end(), 0.0) / static_cast<double>(lengths.size());
    std::sort(lengths.begin(), lengths.end());
    const std::size_t h = lengths.size() / 2;
    out.median_sojourn_slots = lengths.size() % 2
                                   ? static_cast<double>(lengths[h])
                                   : 0.5 * static_cast<double>(lengths[h - 1] + lengths[h]);
  }
  return out;
}

bool clique_feasible(const ContentionGraph& g, std::span<const int> clique,
                     std::span<const double> airtimes) {
  if (static_cast<int>(airtimes.size()) != g.size())
    throw std::invalid_argument("clique: need one airtime per link");
  for (double x : airtimes)
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("clique: airtime outside [0, 1]");
  for (std::size_t a = 0; a < clique.size(); ++a) {
    if (clique[a] < 0 || clique[a] >= g.size()) throw std::invalid_argument("clique: link out of range");
    for (std::size_t b = a + 1; b < clique.size(); ++b)
      if (!g.adjacent(clique[a], clique[b]))
        throw std::invalid_argument("clique: links " + std::to_string(clique[a] + 1) + " and " +
                                    std::to_string(clique[b] + 1) + " are not adjacent");
  }
  double sum = 0.0;
  for (int i : clique) sum += airtimes[i];
  return sum <= 1.0 + 1e-12;
}

std::string format_link_set(LinkSet s) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < 32; ++i) {
    if (!(s & bit(i))) continue;
    if (!first) out += ',';
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

}  // namespace pcs
