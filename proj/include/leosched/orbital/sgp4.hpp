#pragma once

#include <array>
#include <stdexcept>

#include "leosched/orbital/tle.hpp"
#include "leosched/time.hpp"

namespace leosched::orbital {

using Vec3 = std::array<double, 3>;

/// Position (km) and velocity (km/s) in the TEME frame.
struct SatelliteState {
  int norad_id = 0;
  Timestamp t{};
  Vec3 position{};
  Vec3 velocity{};
};

class PropagationError : public std::runtime_error {
 public:
  enum class Kind { kEccentricity, kMeanMotion, kSemiLatusRectum, kDecayed, kDeepSpace, kStale };
  PropagationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Near-earth SGP4 (WGS-72 constants, improved-mode initialisation).
/// Orbits with periods of 225 minutes or more need the deep-space
/// extension and are rejected at construction.
class Sgp4 {
 public:
  explicit Sgp4(const TleRecord& record);

  /// State `minutes` after the element-set epoch.
  SatelliteState propagate_minutes(double minutes) const;

  /// State at `t`. Throws PropagationError(kStale) when |t - epoch| exceeds
  /// `max_age_days`; pass a negative value to disable the guard.
  SatelliteState propagate(Timestamp t, double max_age_days = 7.0) const;

  int norad_id() const noexcept { return norad_id_; }
  Timestamp epoch() const noexcept { return epoch_; }

 private:
  int norad_id_ = 0;
  Timestamp epoch_{};

  // Elements (radians, rad/min, earth radii).
  double bstar_ = 0, ecco_ = 0, argpo_ = 0, inclo_ = 0, mo_ = 0, no_ = 0, nodeo_ = 0;
  // Initialised coefficients, named after the reference implementation.
  bool isimp_ = false;
  double aycof_ = 0, con41_ = 0, cc1_ = 0, cc4_ = 0, cc5_ = 0, d2_ = 0, d3_ = 0, d4_ = 0;
  double delmo_ = 0, eta_ = 0, argpdot_ = 0, omgcof_ = 0, sinmao_ = 0, t2cof_ = 0, t3cof_ = 0;
  double t4cof_ = 0, t5cof_ = 0, x1mth2_ = 0, x7thm1_ = 0, mdot_ = 0, nodedot_ = 0, xlcof_ = 0;
  double xmcof_ = 0, nodecf_ = 0;
};

/// One-shot convenience wrapper around Sgp4.
SatelliteState propagate(const TleRecord& record, Timestamp t, double max_age_days = 7.0);

/// Greenwich mean sidereal time (radians, IAU-82) for a UT1 Julian date.
double gmst(double jd_ut1);

}  // namespace leosched::orbital
