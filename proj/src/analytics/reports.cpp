#include "leosched/analytics/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace leosched::analytics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_sorted(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double share(int part, int whole) { return whole > 0 ? static_cast<double>(part) / whole : 0.0; }

// Summing sorted values keeps results independent of record order.
double sorted_mean(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> midranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) r[idx[k]] = rank;
    i = j;
  }
  return r;
}

std::string num(double v, int digits = 4) {
  if (std::isnan(v)) return "";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

double ecdf(const std::vector<double>& sorted, double x) {
  if (sorted.empty()) return kNaN;
  return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
         static_cast<double>(sorted.size());
}

ElevationReport elevation_report(std::span<const SlotRecord> records) {
  ElevationReport r;
  for (const auto& rec : records) {
    const auto* sel = rec.selected_snapshot();
    if (!sel) continue;
    ++r.slots;
    r.selected.push_back(sel->topo.elevation);
    for (const auto& s : rec.available)
      if (s.norad_id != sel->norad_id) r.available.push_back(s.topo.elevation);
  }
  std::sort(r.selected.begin(), r.selected.end());
  std::sort(r.available.begin(), r.available.end());
  r.median_selected = median_sorted(r.selected);
  r.median_available = median_sorted(r.available);
  r.median_gap = r.median_selected - r.median_available;
  const auto high = [](const std::vector<double>& v) {
    const auto n = std::count_if(v.begin(), v.end(), [](double e) { return e >= 45.0 && e <= 90.0; });
    return v.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(v.size());
  };
  r.high_band_available = high(r.available);
  r.high_band_selected = high(r.selected);
  return r;
}

const char* to_string(Quadrant q) {
  switch (q) {
    case kNorthWest: return "NW";
    case kNorthEast: return "NE";
    case kSouthEast: return "SE";
    case kSouthWest: return "SW";
  }
  return "?";
}

Quadrant quadrant_of(double azimuth, double boresight_offset) {
  double a = std::fmod(azimuth - boresight_offset, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 270.0) return kNorthWest;
  if (a >= 180.0) return kSouthWest;
  if (a >= 90.0) return kSouthEast;
  return kNorthEast;
}

AzimuthReport azimuth_report(std::span<const SlotRecord> records, double boresight_offset) {
  AzimuthReport r;
  std::array<int, 4> avail{}, sel{};
  int avail_total = 0;
  for (const auto& rec : records) {
    const auto* s = rec.selected_snapshot();
    if (!s) continue;
    ++r.slots;
    ++sel[quadrant_of(s->topo.azimuth, boresight_offset)];
    for (const auto& a : rec.available)
      if (a.norad_id != s->norad_id) {
        ++avail[quadrant_of(a.topo.azimuth, boresight_offset)];
        ++avail_total;
      }
  }
  for (std::size_t q = 0; q < 4; ++q) {
    r.available[q] = share(avail[q], avail_total);
    r.selected[q] = share(sel[q], r.slots);
  }
  r.north_available = r.available[kNorthWest] + r.available[kNorthEast];
  r.north_selected = r.selected[kNorthWest] + r.selected[kNorthEast];
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) return kNaN;
  const auto rx = midranks(x), ry = midranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n, my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

LaunchBinReport launch_bin_report(std::span<const SlotRecord> records, const orbital::LaunchCatalog& catalog) {
  LaunchBinReport r;
  std::map<orbital::LaunchBin, std::pair<int, int>> counts;  // picked, available
  std::set<int> unresolved;
  const auto bin_of = [&](int id) -> std::optional<orbital::LaunchBin> {
    const auto* d = catalog.find(id);
    if (!d) return std::nullopt;
    const std::chrono::year_month_day ymd{*d};
    return orbital::LaunchBin{int(ymd.year()), unsigned(ymd.month()), false};
  };
  for (const auto& rec : records) {
    if (!rec.selected) continue;
    const auto picked = bin_of(*rec.selected);
    if (!picked) {
      ++r.unresolved_slots;
      unresolved.insert(*rec.selected);
      continue;
    }
    ++r.slots;
    std::set<orbital::LaunchBin> present;
    for (const auto& a : rec.available) {
      if (const auto b = bin_of(a.norad_id)) present.insert(*b);
      else unresolved.insert(a.norad_id);
    }
    for (const auto& b : present) ++counts[b].second;
    ++counts[*picked].first;
  }
  std::vector<double> order, prob;
  for (const auto& [bin, c] : counts) {
    LaunchBinRow row{bin, c.first, c.second, share(c.first, c.second)};
    order.push_back(static_cast<double>(r.bins.size()));
    prob.push_back(row.probability);
    r.bins.push_back(row);
  }
  r.spearman = spearman(order, prob);
  r.unresolved_ids.assign(unresolved.begin(), unresolved.end());
  return r;
}

SunlitReport sunlit_report(std::span<const SlotRecord> records) {
  SunlitReport r;
  int sunlit_picks = 0;
  std::vector<double> shares, dark_elevations, sunlit_elevations;
  double min_dark_share = std::numeric_limits<double>::infinity();
  for (const auto& rec : records) {
    const auto* sel = rec.selected_snapshot();
    if (!sel) continue;
    const auto lit = std::count_if(rec.available.begin(), rec.available.end(), [](const auto& s) { return s.sunlit; });
    const auto total = static_cast<long>(rec.available.size());
    if (lit == 0 || lit == total) continue;
    ++r.mixed_slots;
    shares.push_back(static_cast<double>(lit) / static_cast<double>(total));
    if (sel->sunlit) {
      ++sunlit_picks;
      continue;
    }
    ++r.dark_picks;
    min_dark_share = std::min(min_dark_share, static_cast<double>(total - lit) / static_cast<double>(total));
    dark_elevations.push_back(sel->topo.elevation);
    for (const auto& s : rec.available)
      if (s.sunlit) sunlit_elevations.push_back(s.topo.elevation);
  }
  if (r.mixed_slots == 0) throw std::invalid_argument("no slot offers both sunlit and dark satellites");
  r.sunlit_pick_rate = share(sunlit_picks, r.mixed_slots);
  r.sunlit_available_share = sorted_mean(shares);
  r.min_dark_share_when_dark_picked = r.dark_picks ? min_dark_share : kNaN;
  r.dark_pick_elevation_gap = r.dark_picks ? sorted_mean(dark_elevations) - sorted_mean(sunlit_elevations) : kNaN;
  return r;
}

std::string elevation_cdf_csv(const ElevationReport& r) {
  std::string out = "elevation_deg,cdf_selected,cdf_available\n";
  for (int e = 25; e <= 90; ++e) out += std::to_string(e) + "," + num(ecdf(r.selected, e)) + "," + num(ecdf(r.available, e)) + "\n";
  return out;
}

std::string azimuth_csv(const AzimuthReport& r) {
  std::string out = "quadrant,available_share,selected_share\n";
  for (auto q : {kNorthWest, kNorthEast, kSouthEast, kSouthWest})
    out += std::string(to_string(q)) + "," + num(r.available[q]) + "," + num(r.selected[q]) + "\n";
  return out;
}

std::string launch_bin_csv(const LaunchBinReport& r) {
  std::string out = "launch_month,picked_slots,available_slots,pick_probability\n";
  char month[16];
  for (const auto& b : r.bins) {
    std::snprintf(month, sizeof month, "%04d-%02u", b.bin.year, b.bin.month);
    out += std::string(month) + "," + std::to_string(b.picked) + "," + std::to_string(b.available) + "," +
           num(b.probability) + "\n";
  }
  return out;
}

std::string summary_csv(const ElevationReport& e, const AzimuthReport& a, const LaunchBinReport* l,
                        const SunlitReport* s) {
  std::string out = "metric,value\n";
  const auto row = [&](const char* k, double v) { out += std::string(k) + "," + num(v) + "\n"; };
  row("slots", e.slots);
  row("median_elevation_selected", e.median_selected);
  row("median_elevation_available", e.median_available);
  row("median_elevation_gap", e.median_gap);
  row("high_band_share_available", e.high_band_available);
  row("high_band_share_selected", e.high_band_selected);
  row("north_share_available", a.north_available);
  row("north_share_selected", a.north_selected);
  if (l) {
    row("launch_bin_spearman", l->spearman);
    row("launch_unresolved_slots", l->unresolved_slots);
  }
  if (s) {
    row("mixed_slots", s->mixed_slots);
    row("sunlit_pick_rate", s->sunlit_pick_rate);
    row("sunlit_available_share", s->sunlit_available_share);
    row("min_dark_share_when_dark_picked", s->min_dark_share_when_dark_picked);
    row("dark_pick_elevation_gap", s->dark_pick_elevation_gap);
  }
  return out;
}

std::string cdf_plot_svg(const std::vector<double>& selected, const std::vector<double>& available,
                         const std::string& title, const std::string& x_label, double x_min, double x_max) {
  constexpr double kW = 640, kH = 420, kPad = 60;
  const auto x_of = [&](double v) { return kPad + (kW - 2 * kPad) * (v - x_min) / (x_max - x_min); };
  const auto y_of = [&](double p) { return kH - kPad - (kH - 2 * kPad) * p; };
  const auto path = [&](const std::vector<double>& sorted) {
    std::string d;
    char buf[64];
    const std::size_t steps = 200;
    for (std::size_t i = 0; i <= steps; ++i) {
      const double v = x_min + (x_max - x_min) * static_cast<double>(i) / steps;
      const double p = sorted.empty() ? 0.0 : ecdf(sorted, v);
      std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", i ? " L" : "M", x_of(v), y_of(p));
      d += buf;
    }
    return d;
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kPad << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n"
     << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kW - 2 * kPad
     << "\" height=\"" << kH - 2 * kPad << "\"/></g>\n"
     << "<path d=\"" << path(available) << "\" stroke=\"#555\" stroke-dasharray=\"3,3\" fill=\"none\" stroke-width=\"2\"/>\n"
     << "<path d=\"" << path(selected) << "\" stroke=\"#1f77b4\" fill=\"none\" stroke-width=\"2\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 20 << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
     << x_label << "</text>\n"
     << "<text x=\"" << kPad << "\" y=\"" << kH - kPad + 15 << "\" font-family=\"sans-serif\" font-size=\"11\">" << num(x_min, 0)
     << "</text>\n"
     << "<text x=\"" << kW - kPad << "\" y=\"" << kH - kPad + 15
     << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << num(x_max, 0) << "</text>\n"
     << "<text x=\"" << kW - kPad - 150 << "\" y=\"" << kPad + 20 << "\" font-family=\"sans-serif\" font-size=\"11\">"
     << "solid: selected, dotted: available</text>\n"
     << "</svg>\n";
  return os.str();
}

}  // namespace leosched::analytics
