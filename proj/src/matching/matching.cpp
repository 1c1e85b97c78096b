#include "leosched/matching/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace leosched::matching {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

CartesianTrack to_cartesian(std::span<const obstruction::PolarPoint> points, std::string source) {
  CartesianTrack out;
  out.source = std::move(source);
  out.points.reserve(points.size());
  for (const auto& p : points) {
    const double r = 90.0 - p.elevation;
    out.points.push_back({r * std::sin(p.azimuth * kDeg), r * std::cos(p.azimuth * kDeg)});
  }
  return out;
}

CartesianTrack to_cartesian(const obstruction::PolarTrack& track) { return to_cartesian(track.points); }

double dtw_distance(const CartesianTrack& a, const CartesianTrack& b) {
  const std::size_t n = a.points.size(), m = b.points.size();
  if (n == 0 || m == 0) throw std::invalid_argument("dtw_distance: empty track");
  // Two rolling rows of the (n+1) x (m+1) accumulated-cost table.
  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double step = std::min({prev[j], cur[j - 1], prev[j - 1]});
      cur[j] = distance(a.points[i - 1], b.points[j - 1]) + step;
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

CartesianTrack resample_arc_length(const CartesianTrack& track, std::size_t n) {
  if (track.points.empty() || n == 0) throw std::invalid_argument("resample_arc_length: empty input");
  CartesianTrack out;
  out.source = track.source;
  const auto& p = track.points;
  std::vector<double> cumulative(p.size(), 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) cumulative[i] = cumulative[i - 1] + distance(p[i - 1], p[i]);
  const double total = cumulative.back();
  if (n == 1 || total == 0.0) {
    out.points.assign(n, p.front());
    if (n > 1) out.points.back() = p.back();
    return out;
  }
  out.points.reserve(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == n - 1) {
      out.points.push_back(p.back());
      break;
    }
    const double s = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 1 < p.size() - 1 && cumulative[seg + 1] < s) ++seg;
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double f = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
    out.points.push_back({p[seg].x + f * (p[seg + 1].x - p[seg].x), p[seg].y + f * (p[seg + 1].y - p[seg].y)});
  }
  return out;
}

CartesianTrack reversed(CartesianTrack track) {
  std::reverse(track.points.begin(), track.points.end());
  return track;
}

const char* to_string(Orientation o) { return o == Orientation::kForward ? "forward" : "reversed"; }

std::vector<obstruction::PolarPoint> candidate_trajectory(const orbital::Constellation::Satellite& sat,
                                                          const orbital::ObserverLocation& obs,
                                                          Timestamp slot_start, const MatchConfig& config) {
  const obstruction::MapGeometry geom;
  std::vector<obstruction::PolarPoint> out;
  const int n = config.samples();
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Timestamp t = add_seconds(slot_start, i * config.cadence_seconds);
    const auto topo = orbital::look_angles(sat.model.propagate(t, config.max_tle_age_days), obs);
    out.push_back({std::clamp(topo.elevation, geom.elevation_at_rim, geom.elevation_at_center), topo.azimuth});
  }
  return out;
}

MatchResult identify_satellite(const obstruction::PolarTrack& track, const orbital::Constellation& constellation,
                               const orbital::ObserverLocation& obs, Timestamp slot_start,
                               const MatchConfig& config) {
  if (track.points.size() < 2) throw std::invalid_argument("identify_satellite: track needs at least 2 points");
  const int n = config.samples();
  const CartesianTrack forward = resample_arc_length(to_cartesian(track), static_cast<std::size_t>(n));
  const CartesianTrack backward = reversed(forward);

  const Timestamp midpoint = add_seconds(slot_start, config.slot_seconds / 2.0);
  orbital::VisibilityOptions vis;
  vis.min_elevation = config.min_elevation;
  vis.max_tle_age_days = config.max_tle_age_days;
  const auto candidates = orbital::visible_satellites(constellation, obs, midpoint, vis).visible;
  if (candidates.empty())
    throw NoCandidates("no satellite above " + std::to_string(config.min_elevation) + " deg at " + format_iso(midpoint));

  MatchResult result;
  result.slot_index = track.slot_index;
  result.best_distance = kInf;
  result.runner_up_distance = kInf;
  for (const auto& snap : candidates) {
    const auto* sat = constellation.find(snap.norad_id);
    const CartesianTrack cand = to_cartesian(candidate_trajectory(*sat, obs, slot_start, config));
    const double df = dtw_distance(cand, forward);
    const double db = dtw_distance(cand, backward);
    const double d = std::min(df, db);
    ++result.candidates_considered;
    // Strict comparison keeps the earlier (catalog-order) candidate on ties.
    if (d < result.best_distance) {
      result.runner_up_distance = result.best_distance;
      result.best_distance = d;
      result.best = snap.norad_id;
      result.orientation = db < df ? Orientation::kReversed : Orientation::kForward;
    } else if (d < result.runner_up_distance) {
      result.runner_up_distance = d;
    }
  }
  result.margin = result.runner_up_distance - result.best_distance;
  result.low_confidence = result.margin < config.min_margin;
  return result;
}

std::string match_csv_header() { return "terminal_id,slot_start_iso,norad_id,distance,margin,orientation,candidates"; }

std::string match_csv_row(const std::string& terminal_id, Timestamp slot_start, const MatchResult& r) {
  char buf[256];
  char margin[32];
  if (std::isinf(r.margin)) std::snprintf(margin, sizeof margin, "inf");
  else std::snprintf(margin, sizeof margin, "%.6f", r.margin);
  std::snprintf(buf, sizeof buf, ",%d,%.6f,%s,%s,%d", r.best, r.best_distance, margin, to_string(r.orientation),
                r.candidates_considered);
  return terminal_id + "," + format_iso(slot_start) + buf;
}

}  // namespace leosched::matching
