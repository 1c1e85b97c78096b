#include "leosched/obstruction/map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace leosched::obstruction {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double elevation_span(const MapGeometry& g) { return g.elevation_at_center - g.elevation_at_rim; }

}  // namespace

std::size_t ObstructionMap::lit_count() const {
  return static_cast<std::size_t>(std::count(pixels_.begin(), pixels_.end(), std::uint8_t{1}));
}

std::vector<Pixel> ObstructionMap::lit_pixels() const {
  std::vector<Pixel> out;
  for (int row = 0; row < kMapSize; ++row)
    for (int col = 0; col < kMapSize; ++col)
      if (pixels_[static_cast<std::size_t>(row) * kMapSize + col]) out.push_back({col, row});
  return out;
}

void ObstructionMap::clear() { std::fill(pixels_.begin(), pixels_.end(), std::uint8_t{0}); }

double pixel_radius(Pixel px, const MapGeometry& g) {
  return std::hypot(px.col - g.center_col, px.row - g.center_row);
}

bool inside_disk(Pixel px, const MapGeometry& g, double slack) {
  return pixel_radius(px, g) <= g.radius_px + slack + 1e-9;
}

PolarPoint pixel_to_polar(Pixel px, const MapGeometry& g) {
  if (!ObstructionMap::in_bounds(px) || !inside_disk(px, g, 0.5))
    throw std::invalid_argument("pixel (" + std::to_string(px.col) + ", " + std::to_string(px.row) +
                                ") lies outside the polar plot");
  const double dx = px.col - g.center_col;
  const double up = g.center_row - px.row;  // rows grow downward
  const double r = std::min(std::hypot(dx, up), g.radius_px);
  PolarPoint p;
  p.elevation = g.elevation_at_center - r / g.radius_px * elevation_span(g);
  if (dx == 0.0 && up == 0.0) return p;
  const double east = g.sense == AzimuthSense::kClockwise ? dx : -dx;
  double az = std::atan2(east, up) / kDeg;
  if (az < 0.0) az += 360.0;
  if (az >= 360.0) az -= 360.0;
  p.azimuth = az;
  return p;
}

Pixel polar_to_pixel(PolarPoint p, const MapGeometry& g) {
  if (!(p.elevation >= g.elevation_at_rim - 1e-9 && p.elevation <= g.elevation_at_center + 1e-9))
    throw std::invalid_argument("elevation " + std::to_string(p.elevation) + " outside the plotted range");
  const double r = (g.elevation_at_center - p.elevation) / elevation_span(g) * g.radius_px;
  const double east = r * std::sin(p.azimuth * kDeg);
  const double up = r * std::cos(p.azimuth * kDeg);
  const double x = g.center_col + (g.sense == AzimuthSense::kClockwise ? east : -east);
  const double y = g.center_row - up;
  const Pixel rounded{static_cast<int>(std::round(x)), static_cast<int>(std::round(y))};
  if (inside_disk(rounded, g)) return rounded;

  Pixel best = rounded;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c : {static_cast<int>(std::floor(x)), static_cast<int>(std::ceil(x))})
    for (int row : {static_cast<int>(std::floor(y)), static_cast<int>(std::ceil(y))}) {
      const Pixel cand{c, row};
      const double d = std::hypot(c - x, row - y);
      if (inside_disk(cand, g) && d < best_d) {
        best = cand;
        best_d = d;
      }
    }
  // Still outside: walk one pixel at a time toward the center.
  while (!inside_disk(best, g)) {
    best.col += best.col < g.center_col ? 1 : (best.col > g.center_col ? -1 : 0);
    if (!inside_disk(best, g)) best.row += best.row < g.center_row ? 1 : (best.row > g.center_row ? -1 : 0);
  }
  return best;
}

bool satisfies_disk_invariant(const ObstructionMap& map, const MapGeometry& g) {
  for (const Pixel& p : map.lit_pixels())
    if (!inside_disk(p, g, 0.5)) return false;
  return true;
}

ObstructionMap xor_maps(const ObstructionMap& earlier, const ObstructionMap& later) {
  if (earlier.terminal_id != later.terminal_id)
    throw std::invalid_argument("cannot difference maps from terminals '" + earlier.terminal_id + "' and '" +
                                later.terminal_id + "'");
  if (later.slot_index != earlier.slot_index + 1)
    throw std::invalid_argument("maps are not consecutive slots (" + std::to_string(earlier.slot_index) + " -> " +
                                std::to_string(later.slot_index) + ")");
  ObstructionMap out = later;
  for (int row = 0; row < kMapSize; ++row)
    for (int col = 0; col < kMapSize; ++col) out.set({col, row}, earlier.at({col, row}) != later.at({col, row}));
  return out;
}

const char* to_string(DecodeError::Kind kind) {
  switch (kind) {
    case DecodeError::Kind::kEmptyDiff: return "EmptyDiff";
    case DecodeError::Kind::kAmbiguousDiff: return "AmbiguousDiff";
  }
  return "?";
}

PolarTrack extract_track(const ObstructionMap& diff, const MapGeometry& geom) {
  using Kind = DecodeError::Kind;
  const std::vector<Pixel> lit = diff.lit_pixels();
  if (lit.empty()) throw DecodeError(Kind::kEmptyDiff, "diff has no lit pixels");

  // 8-connected components, labelled in scan order.
  std::vector<int> label(kMapSize * kMapSize, -1);
  const auto at = [&](Pixel p) -> int& { return label[static_cast<std::size_t>(p.row) * kMapSize + p.col]; };
  std::vector<std::vector<Pixel>> components;
  for (const Pixel& seed : lit) {
    if (at(seed) >= 0) continue;
    const int id = static_cast<int>(components.size());
    std::vector<Pixel> comp{seed};
    at(seed) = id;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const Pixel p = comp[i];
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const Pixel q{p.col + dc, p.row + dr};
          if ((dr || dc) && ObstructionMap::in_bounds(q) && diff.at(q) && at(q) < 0) {
            at(q) = id;
            comp.push_back(q);
          }
        }
    }
    std::sort(comp.begin(), comp.end(), [](const Pixel& a, const Pixel& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    components.push_back(std::move(comp));
  }

  std::vector<const std::vector<Pixel>*> trails;
  for (const auto& c : components)
    if (c.size() >= 3) trails.push_back(&c);
  if (trails.empty()) throw DecodeError(Kind::kEmptyDiff, "diff holds only specks smaller than 3 pixels");
  if (trails.size() > 1)
    throw DecodeError(Kind::kAmbiguousDiff, std::to_string(trails.size()) + " separate trails in one diff");
  const std::vector<Pixel>& comp = *trails.front();

  const auto degree = [&](Pixel p) {
    int n = 0;
    for (const Pixel& q : comp) n += adjacent8(p, q) ? 1 : 0;
    return n;
  };
  auto start = std::find_if(comp.begin(), comp.end(), [&](const Pixel& p) { return degree(p) == 1; });
  if (start == comp.end()) throw DecodeError(Kind::kAmbiguousDiff, "trail has no endpoint (closed loop)");

  std::vector<bool> visited(comp.size(), false);
  std::size_t current = static_cast<std::size_t>(start - comp.begin());
  visited[current] = true;
  PolarTrack track;
  track.slot_index = diff.slot_index;
  track.terminal_id = diff.terminal_id;
  track.pixels.push_back(comp[current]);
  for (std::size_t step = 1; step < comp.size(); ++step) {
    std::size_t next = comp.size();
    int best = std::numeric_limits<int>::max();
    for (std::size_t j = 0; j < comp.size(); ++j) {
      if (visited[j]) continue;
      const int dc = comp[j].col - comp[current].col, dr = comp[j].row - comp[current].row;
      const int d2 = dc * dc + dr * dr;
      if (d2 < best) {
        best = d2;
        next = j;
      }
    }
    if (!adjacent8(comp[current], comp[next]))
      throw DecodeError(Kind::kAmbiguousDiff, "trail branches; cannot order it into a single path");
    visited[next] = true;
    current = next;
    track.pixels.push_back(comp[current]);
  }
  track.points.reserve(track.pixels.size());
  for (const Pixel& p : track.pixels) track.points.push_back(pixel_to_polar(p, geom));
  return track;
}

}  // namespace leosched::obstruction
