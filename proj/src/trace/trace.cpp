#include "leosched/trace/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace leosched::trace {

namespace {

constexpr long long kSlotMicros = 15'000'000;

struct Group {
  Timestamp start;
  std::vector<const LatencySample*> samples;
};

std::vector<Group> group_slots(const std::vector<LatencySample>& trace, int offset_s) {
  std::vector<Group> groups;
  for (const auto& s : trace) {
    const Timestamp start = slot_start_for(s.t, offset_s);
    if (groups.empty() || groups.back().start != start) {
      if (!groups.empty() && start < groups.back().start) throw std::invalid_argument("trace is not time-ordered");
      groups.push_back({start, {}});
    }
    groups.back().samples.push_back(&s);
  }
  return groups;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::vector<LatencySample> parse_trace_csv(const std::string& text) {
  std::vector<LatencySample> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "unix_ms,rtt_ms,lost") continue;
    }
    const auto where = "trace line " + std::to_string(line_no) + ": ";
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(trim(cell));
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 3) throw std::invalid_argument(where + "expected 3 fields");
    LatencySample s;
    long long ms = 0;
    if (std::from_chars(f[0].data(), f[0].data() + f[0].size(), ms).ec != std::errc{} )
      throw std::invalid_argument(where + "bad unix_ms '" + f[0] + "'");
    s.t = from_unix_millis(ms);
    if (f[2] != "0" && f[2] != "1") throw std::invalid_argument(where + "lost must be 0 or 1");
    s.lost = f[2] == "1";
    if (!s.lost) {
      try {
        std::size_t used = 0;
        s.rtt_ms = std::stod(f[1], &used);
        if (used != f[1].size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw std::invalid_argument(where + "bad rtt_ms '" + f[1] + "'");
      }
      if (!(s.rtt_ms > 0.0) || !std::isfinite(s.rtt_ms)) throw std::invalid_argument(where + "rtt_ms must be positive");
    }
    if (!out.empty() && s.t < out.back().t) throw std::invalid_argument(where + "timestamps go backwards");
    out.push_back(s);
  }
  return out;
}

std::string to_trace_csv(const std::vector<LatencySample>& trace) {
  std::string out = "unix_ms,rtt_ms,lost\n";
  char buf[64];
  for (const auto& s : trace) {
    if (s.lost) std::snprintf(buf, sizeof buf, "%lld,,1\n", static_cast<long long>(to_unix_millis(s.t)));
    else std::snprintf(buf, sizeof buf, "%lld,%.3f,0\n", static_cast<long long>(to_unix_millis(s.t)), s.rtt_ms);
    out += buf;
  }
  return out;
}

Timestamp slot_start_for(Timestamp t, int offset_s) {
  if (offset_s < 0 || offset_s >= 15) throw std::invalid_argument("offset must lie in [0, 15)");
  const long long us = t.time_since_epoch().count() - offset_s * 1'000'000LL;
  long long k = us / kSlotMicros;
  if (k * kSlotMicros > us) --k;
  return Timestamp(Micros(k * kSlotMicros + offset_s * 1'000'000LL));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SlotStats> slice_slots(const std::vector<LatencySample>& trace, int offset_s) {
  if (trace.empty()) throw std::invalid_argument("empty trace");
  std::vector<SlotStats> out;
  for (const auto& g : group_slots(trace, offset_s)) {
    SlotStats s;
    s.slot_start = g.start;
    s.n = static_cast<int>(g.samples.size());
    int lost = 0;
    for (const auto* p : g.samples) {
      if (p->lost) ++lost;
      else s.rtts.push_back(p->rtt_ms);
    }
    s.loss_rate = static_cast<double>(lost) / s.n;
    s.median = quantile(s.rtts, 0.5);
    s.p5 = quantile(s.rtts, 0.05);
    s.p95 = quantile(s.rtts, 0.95);
    if (s.rtts.size() >= 50) s.bands = detect_bands(s.rtts);
    out.push_back(std::move(s));
  }
  return out;
}

MannWhitney mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3 || y.size() < 3) throw std::invalid_argument("mann_whitney_u needs at least 3 values per sample");
  const std::size_t n = x.size(), m = y.size(), total = n + m;
  std::vector<std::pair<double, bool>> all;
  all.reserve(total);
  for (double v : x) all.emplace_back(v, true);
  for (double v : y) all.emplace_back(v, false);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_x = 0.0, tie_term = 0.0;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && all[j].first == all[i].first) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second) rank_sum_x += midrank;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double dn = static_cast<double>(n), dm = static_cast<double>(m), dN = static_cast<double>(total);
  MannWhitney r;
  r.u = rank_sum_x - dn * (dn + 1.0) / 2.0;
  const double var = dn * dm / 12.0 * ((dN + 1.0) - tie_term / (dN * (dN - 1.0)));
  if (var <= 0.0) return r;  // every value identical
  const double z = std::max(0.0, std::abs(r.u - dn * dm / 2.0) - 0.5) / std::sqrt(var);
  r.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

OffsetDetection detect_offset(const std::vector<LatencySample>& trace, const OffsetOptions& options) {
  if (trace.empty()) throw std::invalid_argument("empty trace");
  if (seconds_between(trace.front().t, trace.back().t) < 10 * 15.0)
    throw std::invalid_argument("trace must span at least 10 slots (150 s)");
  const auto min_n = static_cast<std::size_t>(options.min_samples);

  OffsetDetection out;
  for (int offset = 0; offset < 15; ++offset) {
    const auto groups = group_slots(trace, offset);
    std::vector<std::vector<double>> rtts(groups.size());
    int within_tested = 0, within_sig = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const Timestamp mid = add_seconds(groups[i].start, 7.5);
      std::vector<double> early, late;
      for (const auto* s : groups[i].samples) {
        if (s->lost) continue;
        rtts[i].push_back(s->rtt_ms);
        (s->t < mid ? early : late).push_back(s->rtt_ms);
      }
      if (early.size() >= min_n && late.size() >= min_n) {
        ++within_tested;
        within_sig += mann_whitney_u(early, late).p < options.alpha;
      }
    }
    int between_tested = 0, between_sig = 0;
    for (std::size_t i = 1; i < groups.size(); ++i) {
      if (seconds_between(groups[i - 1].start, groups[i].start) != 15.0) continue;
      if (rtts[i - 1].size() < min_n || rtts[i].size() < min_n) continue;
      ++between_tested;
      between_sig += mann_whitney_u(rtts[i - 1], rtts[i]).p < options.alpha;
    }
    const auto o = static_cast<std::size_t>(offset);
    out.between[o] = between_tested ? static_cast<double>(between_sig) / between_tested : 0.0;
    out.within[o] = within_tested ? static_cast<double>(within_sig) / within_tested : 0.0;
    out.scores[o] = out.between[o] * (1.0 - out.within[o]);
  }
  out.offset_s = static_cast<int>(std::max_element(out.scores.begin(), out.scores.end()) - out.scores.begin());
  out.conclusive = out.scores[static_cast<std::size_t>(out.offset_s)] >= options.conclusive_score;
  return out;
}

std::vector<Band> detect_bands(const std::vector<double>& rtts, double band_gap_ms, double min_fraction) {
  if (rtts.empty()) return {};
  std::vector<double> sorted = rtts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Band> bands;
  const double n = static_cast<double>(sorted.size());
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] - sorted[i - 1] <= band_gap_ms) continue;
    const std::vector<double> cluster(sorted.begin() + static_cast<std::ptrdiff_t>(begin),
                                      sorted.begin() + static_cast<std::ptrdiff_t>(i));
    const double fraction = static_cast<double>(cluster.size()) / n;
    if (fraction >= min_fraction)
      bands.push_back({quantile(cluster, 0.5), quantile(cluster, 0.95) - quantile(cluster, 0.05), fraction});
    begin = i;
  }
  return bands;
}

std::size_t count_clusters(const std::vector<double>& rtts, double band_gap_ms) {
  if (rtts.empty()) return 0;
  std::vector<double> sorted = rtts;
  std::sort(sorted.begin(), sorted.end());
  std::size_t clusters = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) clusters += sorted[i] - sorted[i - 1] > band_gap_ms;
  return clusters;
}

std::vector<LatencySample> synthetic_trace(const SyntheticTraceSpec& spec) {
  if (spec.cadence_ms <= 0 || !(spec.duration_s > 0.0) || !(spec.noise_sigma_ms >= 0.0))
    throw std::invalid_argument("synthetic trace needs positive cadence and duration");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma_ms);
  std::bernoulli_distribution coin(0.5), drop(spec.loss_rate);
  std::vector<LatencySample> out;
  const long long steps = static_cast<long long>(spec.duration_s * 1000.0) / spec.cadence_ms;
  out.reserve(static_cast<std::size_t>(steps));
  double level = spec.base_ms;
  Timestamp current{};
  for (long long i = 0; i < steps; ++i) {
    LatencySample s;
    s.t = spec.start + std::chrono::milliseconds(i * spec.cadence_ms);
    const Timestamp slot = slot_start_for(s.t, spec.offset_s);
    if (i == 0) current = slot;
    if (slot != current) {
      current = slot;
      // Step up or down; stay inside a plausible RTT range.
      const bool up = level - spec.shift_ms < 0.5 * spec.base_ms || (level + spec.shift_ms <= 2.0 * spec.base_ms && coin(rng));
      level += up ? spec.shift_ms : -spec.shift_ms;
    }
    s.lost = spec.loss_rate > 0.0 && drop(rng);
    s.rtt_ms = s.lost ? 0.0 : std::max(0.1, level + noise(rng));
    out.push_back(s);
  }
  return out;
}

std::string slot_stats_csv_header() { return "slot_start_iso,n,median_ms,p5_ms,p95_ms,loss_rate,bands"; }

std::string slot_stats_csv_row(const SlotStats& s) {
  std::string bands;
  for (const auto& b : s.bands) {
    if (!bands.empty()) bands += ';';
    bands += fmt(b.center_ms) + ":" + fmt(b.width_ms) + ":" + fmt(b.fraction);
  }
  char loss[32];
  std::snprintf(loss, sizeof loss, "%.4f", s.loss_rate);
  return format_iso(s.slot_start) + "," + std::to_string(s.n) + "," + fmt(s.median) + "," + fmt(s.p5) + "," +
         fmt(s.p95) + "," + loss + "," + bands;
}

std::string strip_plot_svg(const std::vector<LatencySample>& trace, int offset_s, const std::string& title) {
  constexpr double kW = 1200, kH = 400, kPad = 50;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kPad << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : trace)
    if (!s.lost) lo = std::min(lo, s.rtt_ms), hi = std::max(hi, s.rtt_ms);
  if (trace.empty() || !std::isfinite(lo)) {
    os << "</svg>\n";
    return os.str();
  }
  if (hi - lo < 1.0) hi = lo + 1.0;
  const double span = std::max(1.0, seconds_between(trace.front().t, trace.back().t));
  const auto x_of = [&](Timestamp t) { return kPad + (kW - 2 * kPad) * seconds_between(trace.front().t, t) / span; };
  const auto y_of = [&](double v) { return kH - kPad - (kH - 2 * kPad) * (v - lo) / (hi - lo); };
  os << "<g stroke=\"#bbb\" stroke-width=\"1\">\n";
  for (Timestamp b = add_seconds(slot_start_for(trace.front().t, offset_s), 15.0); b <= trace.back().t; b = add_seconds(b, 15.0))
    os << "<line x1=\"" << x_of(b) << "\" y1=\"" << kPad << "\" x2=\"" << x_of(b) << "\" y2=\"" << kH - kPad << "\"/>\n";
  os << "</g>\n<g fill=\"#1f77b4\">\n";
  char buf[96];
  for (const auto& s : trace) {
    if (s.lost) continue;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"1\"/>\n", x_of(s.t), y_of(s.rtt_ms));
    os << buf;
  }
  os << "</g>\n<g fill=\"#d62728\">\n";
  for (const auto& s : trace)
    if (s.lost) {
      std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"1\" height=\"4\"/>\n", x_of(s.t), kH - kPad + 4);
      os << buf;
    }
  os << "</g>\n";
  os << "<text x=\"5\" y=\"" << y_of(lo) << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(lo) << " ms</text>\n";
  os << "<text x=\"5\" y=\"" << y_of(hi) + 10 << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(hi) << " ms</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace leosched::trace
