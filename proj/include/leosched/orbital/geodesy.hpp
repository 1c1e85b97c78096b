#pragma once

#include "leosched/orbital/sgp4.hpp"

namespace leosched::orbital {

struct ObserverLocation {
  double latitude = 0.0;   // degrees, [-90, 90]
  double longitude = 0.0;  // degrees, [-180, 180]
  double altitude = 0.0;   // meters above the WGS-84 ellipsoid

  /// Throws std::invalid_argument when a coordinate is out of range.
  void validate() const;
};

/// Look angles from an observer. Azimuth is measured from true north,
/// clockwise, and always lies in [0, 360).
struct Topocentric {
  double elevation = 0.0;  // degrees
  double azimuth = 0.0;    // degrees
  double range = 0.0;      // km
};

Vec3 geodetic_to_ecef(const ObserverLocation& obs);
ObserverLocation ecef_to_geodetic(const Vec3& ecef);

/// Rotates a TEME vector into the Earth-fixed frame using GMST only
/// (polar motion and equation of the equinoxes neglected).
Vec3 teme_to_ecef(const Vec3& teme, Timestamp t);
Vec3 ecef_to_teme(const Vec3& ecef, Timestamp t);

Topocentric look_angles(const SatelliteState& state, const ObserverLocation& obs);

/// Inverse of look_angles: the TEME position seen at `topo` from `obs` at `t`.
Vec3 position_from_look_angles(const ObserverLocation& obs, const Topocentric& topo, Timestamp t);

/// Unit vector toward the Sun (mean equator of date, which is within the
/// needed tolerance of TEME) from a low-precision solar ephemeris.
Vec3 sun_direction(Timestamp t);

/// Cylindrical umbra test: dark only when the satellite is on the anti-sun
/// side and within one equatorial radius of the shadow axis.
bool is_sunlit(const Vec3& position, const Vec3& sun_unit);
bool is_sunlit(const SatelliteState& state, Timestamp t);
bool is_sunlit(const SatelliteState& state);

inline constexpr double kWgs84RadiusKm = 6378.137;

}  // namespace leosched::orbital
