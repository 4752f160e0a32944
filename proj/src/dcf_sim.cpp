#include "pcs/dcf_sim.hpp"

#include <algorithm>
#include <bit>
#include <ostream>

namespace pcs {

namespace {

using Mask = std::uint64_t;

constexpr Mask bit(std::size_t i) { return Mask{1} << i; }

template <class F>
void for_each_bit(Mask m, F&& f) {
  while (m) {
    const auto i = static_cast<std::size_t>(std::countr_zero(m));
    f(i);
    m &= m - 1;
  }
}

struct SlotView {
  Mask ongoing = 0;   // transmitting since an earlier slot
  Mask starting = 0;  // TxStart this slot
  Mask stopping = 0;  // this slot is the last transmitting slot
  Mask counting = 0;  // in countdown this slot and not starting
};

// Graph01 and CsRange: deterministic hearing masks.
class FixedSensor {
 public:
  explicit FixedSensor(std::vector<Mask> hears) : hears_(std::move(hears)) {}

  bool at_zero(std::size_t i, const SlotView& v, RandomStream&) {
    return (hears_[i] & v.ongoing) != 0;
  }
  bool counting(std::size_t i, const SlotView& v, RandomStream&) {
    return (hears_[i] & (v.ongoing | v.starting)) != 0;
  }
  void finish_slot(const SlotView&, std::vector<RandomStream>&) {}

 private:
  std::vector<Mask> hears_;
};

class BernoulliSensor {
 public:
  explicit BernoulliSensor(const BernoulliModel& m) : model_(m) {}

  bool at_zero(std::size_t i, const SlotView& v, RandomStream& rng) {
    return draw(i, v.ongoing & ~bit(i), rng);
  }
  bool counting(std::size_t i, const SlotView& v, RandomStream& rng) {
    return draw(i, (v.ongoing | v.starting) & ~bit(i), rng);
  }
  void finish_slot(const SlotView&, std::vector<RandomStream>&) {}

 private:
  bool draw(std::size_t i, Mask speakers, RandomStream& rng) {
    bool busy = false;
    for_each_bit(speakers, [&](std::size_t j) { busy |= rng.bernoulli(model_.hearing(i, j)); });
    return busy;
  }

  const BernoulliModel& model_;
};

class DetailedSensor {
 public:
  DetailedSensor(const DetailedPqrModel& m, std::size_t n, std::int64_t frame_slots)
      : model_(m), n_(n), frame_slots_(frame_slots), states_(n * n), stepped_(n, 0) {}

  bool at_zero(std::size_t i, const SlotView& v, RandomStream& rng) {
    bool frozen = false;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i) continue;
      const auto phase = states_[i * n_ + j].phase;
      const bool pending = phase == SensingPhase::Tracking || phase == SensingPhase::Reserved;
      if ((v.ongoing & bit(j)) || pending) frozen |= step(i, j, v, true, rng);
    }
    return frozen;
  }

  bool counting(std::size_t i, const SlotView& v, RandomStream& rng) {
    bool frozen = false;
    for (std::size_t j = 0; j < n_; ++j)
      if (j != i) frozen |= step(i, j, v, true, rng);
    return frozen;
  }

  void finish_slot(const SlotView& v, std::vector<RandomStream>& rngs) {
    for (std::size_t i = 0; i < n_; ++i) {
      const bool counting = (v.counting & bit(i)) != 0;
      for (std::size_t j = 0; j < n_; ++j)
        if (j != i && !(stepped_[i] & bit(j))) step(i, j, v, counting, rngs[i]);
      stepped_[i] = 0;
    }
  }

 private:
  bool step(std::size_t i, std::size_t j, const SlotView& v, bool counting, RandomStream& rng) {
    stepped_[i] |= bit(j);
    PairEvents ev;
    ev.speaker_starts = (v.starting & bit(j)) != 0;
    ev.speaker_active = ((v.ongoing | v.starting) & bit(j)) != 0;
    ev.speaker_stops = (v.stopping & bit(j)) != 0;
    ev.listener_counting = counting;
    auto& st = states_[i * n_ + j];
    const auto res = detailed_step(model_, st, ev, frame_slots_, rng);
    st = res.state;
    return res.frozen;
  }

  const DetailedPqrModel& model_;
  std::size_t n_;
  std::int64_t frame_slots_;
  std::vector<SensingState> states_;
  std::vector<Mask> stepped_;
};

struct LinkRuntime {
  bool transmitting = false;
  std::int64_t remaining = 0;  // countdown counter
  std::int64_t cw = 0;
  std::int64_t tx_start = 0;
  Mask interferers = 0;
};

class Engine {
 public:
  explicit Engine(const Scenario& s)
      : s_(s), n_(s.links.size()), tx_slots_(tx_slots(s.phy)), links_(n_), report_links_(n_) {
    std::vector<Position> senders;
    for (const auto& l : s.links) senders.push_back(l.sender);
    interact_.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (may_interact(s.cs, senders, i, j)) interact_[i] |= bit(j);

    for (std::size_t i = 0; i < n_; ++i) {
      backoff_rng_.emplace_back(s.seed, i, StreamPurpose::Backoff);
      sensing_rng_.emplace_back(s.seed, i, StreamPurpose::Sensing);
      capture_rng_.emplace_back(s.seed, i, StreamPurpose::Capture);
      report_links_[i].link_id = s.links[i].id;
    }
    trace_.n_links = n_;
    trace_.tx_slots = tx_slots_;
    trace_.duration_slots = s.duration_slots;
    for (const auto& l : s.links) trace_.link_ids.push_back(l.id);
  }

  template <class Sensor>
  SimResult run(Sensor& sensor) {
    for (std::size_t i = 0; i < n_; ++i) {
      links_[i].cw = s_.phy.cw_min;
      links_[i].remaining = backoff_draw(links_[i].cw, backoff_rng_[i]);
    }
    for (std::int64_t t = 0; t < s_.duration_slots; ++t) step(t, sensor);
    finish_in_flight();
    return {std::move(trace_), build_report()};
  }

 private:
  template <class Sensor>
  void step(std::int64_t t, Sensor& sensor) {
    SlotView v;
    Mask countdown = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (links_[i].transmitting)
        v.ongoing |= bit(i);
      else
        countdown |= bit(i);
    }

    Mask frozen = 0;
    for_each_bit(countdown, [&](std::size_t i) {
      if (links_[i].remaining != 0) return;
      if (sensor.at_zero(i, v, sensing_rng_[i]))
        frozen |= bit(i);
      else
        v.starting |= bit(i);
    });
    v.counting = countdown & ~v.starting;
    if (tx_slots_ == 1) v.stopping |= v.starting;
    for_each_bit(v.ongoing, [&](std::size_t i) {
      if (links_[i].tx_start + tx_slots_ - 1 == t) v.stopping |= bit(i);
    });

    for_each_bit(countdown, [&](std::size_t i) {
      if (links_[i].remaining == 0) return;
      if (sensor.counting(i, v, sensing_rng_[i]))
        frozen |= bit(i);
      else
        --links_[i].remaining;
    });
    sensor.finish_slot(v, sensing_rng_);

    if (frozen) {
      for_each_bit(frozen, [&](std::size_t i) {
        ++report_links_[i].frozen_slots;
        if (s_.trace == TraceLevel::Freezes)
          trace_.events.push_back({t, static_cast<std::uint32_t>(i), TraceEventKind::FreezeSlot});
      });
    }

    for_each_bit(v.starting, [&](std::size_t i) {
      auto& l = links_[i];
      l.transmitting = true;
      l.tx_start = t;
      l.interferers = 0;
      ++report_links_[i].attempts;
      report_links_[i].tx_starts.push_back(t);
      if (s_.trace != TraceLevel::None)
        trace_.events.push_back({t, static_cast<std::uint32_t>(i), TraceEventKind::TxStart});
    });

    const Mask active = v.ongoing | v.starting;
    for_each_bit(active, [&](std::size_t i) { links_[i].interferers |= interact_[i] & active; });

    for_each_bit(v.stopping, [&](std::size_t i) { complete(i); });
  }

  void complete(std::size_t i) {
    auto& l = links_[i];
    std::vector<std::size_t> interferers;
    for_each_bit(l.interferers & ~bit(i), [&](std::size_t j) { interferers.push_back(j); });
    const Outcome outcome = resolve_one(i, interferers, s_.capture, capture_rng_[i]);
    auto& r = report_links_[i];
    r.transmitting_slots += tx_slots_;
    if (outcome == Outcome::Success)
      ++r.successes;
    else
      ++r.losses;
    if (s_.trace != TraceLevel::None)
      trace_.events.push_back(
          {l.tx_start + tx_slots_, static_cast<std::uint32_t>(i), TraceEventKind::TxEnd, outcome});

    if (s_.exponential_backoff)
      l.cw = outcome == Outcome::Success ? s_.phy.cw_min
                                         : std::min<std::int64_t>(2 * l.cw + 1, s_.phy.cw_max);
    l.transmitting = false;
    l.remaining = backoff_draw(l.cw, backoff_rng_[i]);
  }

  void finish_in_flight() {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n_; ++i)
      if (links_[i].transmitting) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return links_[a].tx_start < links_[b].tx_start;
    });
    for (std::size_t i : order) complete(i);
  }

  SimReport build_report() {
    SimReport rep;
    rep.duration_slots = s_.duration_slots;
    rep.slot = s_.phy.slot;
    rep.tx_slots = tx_slots_;
    rep.payload_bits = s_.phy.payload_bits;
    const double seconds = rep.duration_seconds();
    for (auto& r : report_links_) {
      r.throughput_bps = static_cast<double>(r.successes) * static_cast<double>(rep.payload_bits) / seconds;
      r.attempts_per_s = static_cast<double>(r.attempts) / seconds;
      if (r.attempts > 0) r.plr = static_cast<double>(r.losses) / static_cast<double>(r.attempts);
      for (std::size_t k = 1; k < r.tx_starts.size(); ++k)
        r.intervals.push_back(r.tx_starts[k] - r.tx_starts[k - 1]);
    }
    rep.links = std::move(report_links_);
    return rep;
  }

  const Scenario& s_;
  std::size_t n_;
  std::int64_t tx_slots_;
  std::vector<LinkRuntime> links_;
  std::vector<LinkReport> report_links_;
  std::vector<Mask> interact_;
  std::vector<RandomStream> backoff_rng_;
  std::vector<RandomStream> sensing_rng_;
  std::vector<RandomStream> capture_rng_;
  SimTrace trace_;
};

std::vector<Mask> hearing_masks(const Scenario& s) {
  const std::size_t n = s.links.size();
  std::vector<Mask> hears(n, 0);
  if (const auto* g = std::get_if<Graph01Model>(&s.cs)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (g->hears(i, j)) hears[i] |= bit(j);
  } else if (const auto* c = std::get_if<CsRangeModel>(&s.cs)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && distance(s.links[i].sender, s.links[j].sender) < c->cs_range_m)
          hears[i] |= bit(j);
  }
  return hears;
}

}  // namespace

std::int64_t backoff_draw(std::int64_t cw, RandomStream& rng) {
  if (cw <= 0) return 0;
  return rng.uniform_int(0, cw);
}

SimResult run(const Scenario& scenario) {
  validate(scenario);
  Engine engine(scenario);
  if (const auto* b = std::get_if<BernoulliModel>(&scenario.cs)) {
    BernoulliSensor sensor(*b);
    return engine.run(sensor);
  }
  if (const auto* d = std::get_if<DetailedPqrModel>(&scenario.cs)) {
    DetailedSensor sensor(*d, scenario.links.size(), tx_slots(scenario.phy));
    return engine.run(sensor);
  }
  FixedSensor sensor(hearing_masks(scenario));
  return engine.run(sensor);
}

namespace {

const char* event_name(TraceEventKind k) {
  switch (k) {
    case TraceEventKind::TxStart: return "tx_start";
    case TraceEventKind::TxEnd: return "tx_end";
    case TraceEventKind::FreezeSlot: return "freeze";
  }
  return "?";
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << "slot,link_id,event,outcome\n";
  for (const auto& e : trace.events) {
    out << e.slot << ',' << trace.link_ids.at(e.link) << ',' << event_name(e.kind) << ',';
    if (e.kind == TraceEventKind::TxEnd) out << (e.outcome == Outcome::Success ? "success" : "lost");
    out << '\n';
  }
}

void write_report_csv(std::ostream& out, const SimReport& report) {
  out << "link_id,throughput_mbps,plr,attempts_per_s,n_tx\n";
  for (const auto& l : report.links) {
    out << l.link_id << ',' << l.throughput_bps / 1e6 << ',';
    if (l.plr) out << *l.plr;
    out << ',' << l.attempts_per_s << ',' << l.attempts << '\n';
  }
}

}  // namespace pcs
