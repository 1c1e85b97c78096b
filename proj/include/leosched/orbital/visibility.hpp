#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leosched/orbital/geodesy.hpp"
#include "leosched/orbital/launch.hpp"
#include "leosched/orbital/sgp4.hpp"
#include "leosched/orbital/tle.hpp"

namespace leosched::orbital {

struct SatelliteSnapshot {
  int norad_id = 0;
  Timestamp t{};
  Topocentric topo;
  double age_days = 0.0;
  bool sunlit = true;
};

struct VisibilityOptions {
  double min_elevation = 25.0;
  double max_tle_age_days = 7.0;  // negative disables the staleness guard
};

/// A catalog prepared for repeated propagation: each element set paired with
/// its initialised propagator and resolved launch date. Immutable after
/// construction, so it can be shared across threads.
class Constellation {
 public:
  struct Satellite {
    TleRecord tle;
    Sgp4 model;
    LaunchInfo launch;
  };

  Constellation() = default;
  /// Satellites that cannot be initialised (deep-space period, unresolvable
  /// launch date) are left out and described in rejected().
  Constellation(std::span<const TleRecord> records, const LaunchCatalog& launches);

  const std::vector<Satellite>& satellites() const { return satellites_; }
  const std::vector<std::string>& rejected() const { return rejected_; }
  const Satellite* find(int norad_id) const;
  bool empty() const { return satellites_.empty(); }
  std::size_t size() const { return satellites_.size(); }

 private:
  std::vector<Satellite> satellites_;
  std::vector<std::string> rejected_;
};

struct VisibilityResult {
  std::vector<SatelliteSnapshot> visible;
  int propagation_failures = 0;
};

SatelliteSnapshot snapshot(const Constellation::Satellite& sat, const ObserverLocation& obs, Timestamp t,
                           double max_tle_age_days = 7.0);

/// Every satellite at or above the elevation mask, in catalog order.
/// Per-satellite propagation errors are counted, not thrown.
VisibilityResult visible_satellites(const Constellation& constellation, const ObserverLocation& obs,
                                    Timestamp t, const VisibilityOptions& options = {});

VisibilityResult visible_satellites(std::span<const TleRecord> catalog, const LaunchCatalog& launches,
                                    const ObserverLocation& obs, Timestamp t,
                                    const VisibilityOptions& options = {});

}  // namespace leosched::orbital
