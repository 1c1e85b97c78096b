#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "leosched/time.hpp"

namespace leosched::obstruction {

inline constexpr int kMapSize = 123;

struct Pixel {
  int col = 0;
  int row = 0;
  auto operator<=>(const Pixel&) const = default;
};

inline bool adjacent8(const Pixel& a, const Pixel& b) {
  const int dc = a.col - b.col, dr = a.row - b.row;
  return (dc != 0 || dr != 0) && dc >= -1 && dc <= 1 && dr >= -1 && dr <= 1;
}

/// Binary 123x123 obstruction map; true marks a satellite trail.
class ObstructionMap {
 public:
  ObstructionMap() : pixels_(kMapSize * kMapSize, 0) {}

  bool at(Pixel p) const { return pixels_[index(p)] != 0; }
  void set(Pixel p, bool lit) { pixels_[index(p)] = lit ? 1 : 0; }
  static bool in_bounds(Pixel p) { return p.col >= 0 && p.col < kMapSize && p.row >= 0 && p.row < kMapSize; }

  std::size_t lit_count() const;
  /// Lit pixels in row-major scan order.
  std::vector<Pixel> lit_pixels() const;
  void clear();
  bool same_pixels(const ObstructionMap& o) const { return pixels_ == o.pixels_; }

  Timestamp captured_at{};
  int slot_index = 0;
  std::string terminal_id;

  bool operator==(const ObstructionMap&) const = default;

 private:
  static std::size_t index(Pixel p) {
    if (!in_bounds(p)) throw std::out_of_range("pixel outside the 123x123 map");
    return static_cast<std::size_t>(p.row) * kMapSize + static_cast<std::size_t>(p.col);
  }
  std::vector<std::uint8_t> pixels_;
};

enum class AzimuthSense { kClockwise, kCounterClockwise };

/// Polar plot embedded in the map: zenith at the center, the elevation mask
/// on the rim, azimuth zero pointing up (north).
struct MapGeometry {
  double center_col = 62.0;
  double center_row = 62.0;
  double radius_px = 45.0;
  double elevation_at_rim = 25.0;
  double elevation_at_center = 90.0;
  AzimuthSense sense = AzimuthSense::kClockwise;
};

struct PolarPoint {
  double elevation = 0.0;  // degrees
  double azimuth = 0.0;    // degrees, [0, 360)
};

/// Pixels up to half a pixel beyond the rim are accepted (antialiased
/// captures) and decode to the rim elevation.
PolarPoint pixel_to_polar(Pixel px, const MapGeometry& geom = {});

/// Nearest pixel inside the plot disk, rounding half away from zero. At the
/// rim, where plain rounding can step outside the disk, the nearest
/// in-disk neighbour of the exact position is used instead.
Pixel polar_to_pixel(PolarPoint p, const MapGeometry& geom = {});

double pixel_radius(Pixel px, const MapGeometry& geom = {});
bool inside_disk(Pixel px, const MapGeometry& geom = {}, double slack = 0.0);

/// True when every lit pixel lies within radius + 0.5 of the center.
bool satisfies_disk_invariant(const ObstructionMap& map, const MapGeometry& geom = {});

/// Pixel-wise exclusive-or of a slot's map with its predecessor. Metadata
/// comes from `later`. Throws std::invalid_argument unless both maps belong
/// to the same terminal and `later` is the next slot.
ObstructionMap xor_maps(const ObstructionMap& earlier, const ObstructionMap& later);

class DecodeError : public std::runtime_error {
 public:
  enum class Kind { kEmptyDiff, kAmbiguousDiff };
  DecodeError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(DecodeError::Kind kind);

/// Trajectory decoded from a single-slot diff. Direction is not known.
struct PolarTrack {
  std::vector<PolarPoint> points;
  std::vector<Pixel> pixels;  // the chained pixels `points` were decoded from
  int slot_index = 0;
  std::string terminal_id;
};

/// Groups lit pixels by 8-connectivity, ignores components under 3 pixels,
/// and chains the single remaining component into a path starting from a
/// pixel with exactly one lit neighbour.
PolarTrack extract_track(const ObstructionMap& diff, const MapGeometry& geom = {});

}  // namespace leosched::obstruction
