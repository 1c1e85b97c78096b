#include "leosched/orbital/visibility.hpp"

#include <algorithm>

namespace leosched::orbital {

Constellation::Constellation(std::span<const TleRecord> records, const LaunchCatalog& launches) {
  satellites_.reserve(records.size());
  for (const auto& rec : records) {
    try {
      LaunchInfo launch = resolve_launch(rec.norad_id, rec.intl_designator, launches);
      satellites_.push_back({rec, Sgp4(rec), launch});
    } catch (const std::exception& e) {
      rejected_.push_back(e.what());
    }
  }
}

const Constellation::Satellite* Constellation::find(int norad_id) const {
  auto it = std::find_if(satellites_.begin(), satellites_.end(),
                         [norad_id](const Satellite& s) { return s.tle.norad_id == norad_id; });
  return it == satellites_.end() ? nullptr : &*it;
}

SatelliteSnapshot snapshot(const Constellation::Satellite& sat, const ObserverLocation& obs, Timestamp t,
                           double max_tle_age_days) {
  const SatelliteState state = sat.model.propagate(t, max_tle_age_days);
  SatelliteSnapshot snap;
  snap.norad_id = sat.tle.norad_id;
  snap.t = t;
  snap.topo = look_angles(state, obs);
  snap.age_days = age_days(sat.launch, t);
  snap.sunlit = is_sunlit(state, t);
  return snap;
}

VisibilityResult visible_satellites(const Constellation& constellation, const ObserverLocation& obs,
                                    Timestamp t, const VisibilityOptions& options) {
  obs.validate();
  VisibilityResult out;
  const Vec3 sun = sun_direction(t);
  for (const auto& sat : constellation.satellites()) {
    try {
      const SatelliteState state = sat.model.propagate(t, options.max_tle_age_days);
      const Topocentric topo = look_angles(state, obs);
      if (topo.elevation < options.min_elevation) continue;
      out.visible.push_back({sat.tle.norad_id, t, topo, age_days(sat.launch, t), is_sunlit(state.position, sun)});
    } catch (const PropagationError&) {
      ++out.propagation_failures;
    }
  }
  return out;
}

VisibilityResult visible_satellites(std::span<const TleRecord> catalog, const LaunchCatalog& launches,
                                    const ObserverLocation& obs, Timestamp t, const VisibilityOptions& options) {
  const Constellation constellation(catalog, launches);
  VisibilityResult out = visible_satellites(constellation, obs, t, options);
  out.propagation_failures += static_cast<int>(constellation.rejected().size());
  return out;
}

}  // namespace leosched::orbital
