#include "pcs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pcs {

void CountdownHistogram::add(std::int64_t slot, std::int64_t n) {
  if (slot < 0) throw std::invalid_argument("histogram: negative countdown value");
  if (n < 0) throw std::invalid_argument("histogram: negative count");
  if (static_cast<std::size_t>(slot) >= counts.size()) counts.resize(slot + 1, 0);
  counts[slot] += n;
  total += n;
}

void CountdownHistogram::merge(const CountdownHistogram& other) {
  for (std::size_t s = 0; s < other.counts.size(); ++s)
    if (other.counts[s]) add(static_cast<std::int64_t>(s), other.counts[s]);
  insufficient = insufficient && other.insufficient;
}

double CountdownHistogram::fraction(std::int64_t slot) const {
  if (total == 0 || slot < 0 || static_cast<std::size_t>(slot) >= counts.size()) return 0.0;
  return static_cast<double>(counts[slot]) / static_cast<double>(total);
}

double CountdownHistogram::mass(std::int64_t lo, std::int64_t hi) const {
  if (total == 0) return 0.0;
  std::int64_t sum = 0;
  for (std::int64_t s = std::max<std::int64_t>(lo, 0);
       s <= hi && static_cast<std::size_t>(s) < counts.size(); ++s)
    sum += counts[s];
  return static_cast<double>(sum) / static_cast<double>(total);
}

CountdownHistogram interarrival_to_countdown(std::span<const std::int64_t> starts, std::int64_t tx_slots) {
  CountdownHistogram h;
  if (starts.size() < 2) {
    h.insufficient = true;
    return h;
  }
  for (std::size_t k = 1; k < starts.size(); ++k) {
    const std::int64_t c = starts[k] - starts[k - 1] - tx_slots;
    if (c < 0) throw std::logic_error("countdown: TxStarts closer than one frame");
    h.add(c);
  }
  return h;
}

CountdownHistogram interarrival_to_countdown(const LinkReport& link, const PhyParams& phy) {
  return interarrival_to_countdown(link.tx_starts, tx_slots(phy));
}

CountdownHistogram pooled_countdown(const SimReport& report) {
  CountdownHistogram h;
  h.insufficient = true;
  for (const auto& l : report.links) h.merge(interarrival_to_countdown(l.tx_starts, report.tx_slots));
  return h;
}

std::vector<SlotBand> full_cs_bands(const PhyParams& phy, int count) {
  const std::int64_t t = tx_slots(phy);
  std::vector<SlotBand> out;
  for (int k = 0; k < count; ++k) out.push_back({k * t, k * t + phy.cw_min});
  return out;
}

BandReport band_occupancy(const CountdownHistogram& hist, std::span<const SlotBand> bands) {
  std::vector<SlotBand> sorted(bands.begin(), bands.end());
  for (const auto& b : sorted)
    if (b.lo > b.hi) throw std::invalid_argument("bands: inverted interval");
  std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a.lo < b.lo; });
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k].lo <= sorted[k - 1].hi) throw std::invalid_argument("bands: overlapping intervals");

  BandReport r;
  r.bands.assign(bands.begin(), bands.end());
  r.empty = hist.empty();
  if (r.empty) {
    r.fraction.assign(bands.size(), 0.0);
    return r;
  }
  double inside = 0.0;
  for (const auto& b : bands) {
    r.fraction.push_back(hist.mass(b.lo, b.hi));
    inside += r.fraction.back();
  }
  r.out_of_band = std::max(0.0, 1.0 - inside);
  return r;
}

ReportRow report_row(const SimReport& report, std::size_t i) {
  const auto& l = report.links.at(i);
  return {l.link_id, l.throughput_bps / 1e6, l.plr, l.attempts, l.attempts_per_s};
}

std::optional<double> plr_from_counts(std::int64_t attempts, std::int64_t received) {
  if (attempts < 0 || received < 0 || received > attempts)
    throw std::invalid_argument("plr: need 0 <= received <= attempts");
  if (attempts == 0) return std::nullopt;
  return static_cast<double>(attempts - received) / static_cast<double>(attempts);
}

std::int64_t received_from_plr(std::int64_t attempts, double plr) {
  if (attempts < 0 || !(plr >= 0.0 && plr <= 1.0)) throw std::invalid_argument("plr: out of range");
  return std::llround(static_cast<double>(attempts) * (1.0 - plr));
}

double distribution_distance(const CountdownHistogram& a, const CountdownHistogram& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("distance: empty histogram");
  const std::size_t n = std::max(a.counts.size(), b.counts.size());
  double sum = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    sum += std::abs(a.fraction(static_cast<std::int64_t>(s)) - b.fraction(static_cast<std::int64_t>(s)));
  return std::min(1.0, 0.5 * sum);
}

void write_histogram_csv(std::ostream& out, const CountdownHistogram& hist) {
  out << "slot,count,fraction\n";
  for (std::size_t s = 0; s < hist.counts.size(); ++s) {
    if (!hist.counts[s]) continue;
    out << s << ',' << hist.counts[s] << ',' << hist.fraction(static_cast<std::int64_t>(s)) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::runtime_error row_error(int row, const std::string& what) {
  return std::runtime_error("row " + std::to_string(row) + ": " + what);
}

template <class T>
bool parse_number(const std::string& s, T& v) {
  std::istringstream is(s);
  is >> v;
  return !is.fail() && is.eof();
}

bool blank_or_comment(const std::string& line) {
  const auto b = line.find_first_not_of(" \t\r");
  return b == std::string::npos || line[b] == '#';
}

}  // namespace

CountdownHistogram read_histogram_csv(std::istream& in) {
  CountdownHistogram h;
  std::string line;
  int row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (blank_or_comment(line)) continue;
    const auto cells = split_csv(line);
    if (!header_seen) {
      header_seen = true;
      if (!cells.empty() && cells[0] == "slot") {
        if (cells.size() < 2 || cells[1] != "count") throw row_error(row, "expected header slot,count[,fraction]");
        continue;
      }
    }
    if (cells.size() < 2 || cells.size() > 3) throw row_error(row, "expected slot,count[,fraction]");
    std::int64_t slot = 0, count = 0;
    if (!parse_number(cells[0], slot) || slot < 0) throw row_error(row, "bad slot '" + cells[0] + "'");
    if (!parse_number(cells[1], count) || count < 0) throw row_error(row, "bad count '" + cells[1] + "'");
    if (cells.size() == 3) {
      double f = 0.0;
      if (!parse_number(cells[2], f) || f < 0.0 || f > 1.0) throw row_error(row, "bad fraction '" + cells[2] + "'");
    }
    h.add(slot, count);
  }
  if (h.empty()) throw std::runtime_error("histogram: no samples");
  return h;
}

std::vector<double> read_timestamps_csv(std::istream& in) {
  std::vector<double> out;
  std::string line;
  int row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++row;
    if (blank_or_comment(line)) continue;
    const auto cells = split_csv(line);
    double v = 0.0;
    if (cells.size() != 1 || !parse_number(cells[0], v)) {
      if (first && cells.size() == 1) {
        first = false;
        continue;  // header
      }
      throw row_error(row, "expected one timestamp in microseconds");
    }
    first = false;
    out.push_back(v);
  }
  return out;
}

CountdownHistogram countdown_from_timestamps(std::span<const double> ts, const PhyParams& phy) {
  CountdownHistogram h;
  if (ts.size() < 2) {
    h.insufficient = true;
    return h;
  }
  const double frame = to_micros(unshared_tx_time(phy));
  const double slot = to_micros(phy.slot);
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double gap = ts[k] - ts[k - 1];
    if (gap < 0.0) throw std::runtime_error("timestamps: not sorted at sample " + std::to_string(k + 1));
    const auto c = std::llround((gap - frame) / slot);
    if (c < 0)
      throw std::runtime_error("timestamps: gap shorter than one frame at sample " + std::to_string(k + 1));
    h.add(c);
  }
  return h;
}

CountdownHistogram jitter(const CountdownHistogram& hist, std::int64_t max_slots, RandomStream& rng) {
  if (max_slots < 0) throw std::invalid_argument("jitter: negative width");
  CountdownHistogram out;
  out.insufficient = hist.insufficient;
  for (std::size_t s = 0; s < hist.counts.size(); ++s)
    for (std::int64_t k = 0; k < hist.counts[s]; ++k) {
      const std::int64_t v = static_cast<std::int64_t>(s) + rng.uniform_int(-max_slots, max_slots);
      out.add(std::max<std::int64_t>(v, 0));
    }
  return out;
}

}  // namespace pcs
