#include "leosched/orbital/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace leosched::orbital {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kFlattening = 1.0 / 298.257223563;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

struct LocalBasis {
  Vec3 east, north, up;
};

LocalBasis local_basis(const ObserverLocation& obs) {
  const double lat = obs.latitude * kDeg;
  const double lon = obs.longitude * kDeg;
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double so = std::sin(lon), co = std::cos(lon);
  return {{-so, co, 0.0}, {-sl * co, -sl * so, cl}, {cl * co, cl * so, sl}};
}

}  // namespace

void ObserverLocation::validate() const {
  if (!(latitude >= -90.0 && latitude <= 90.0)) throw std::invalid_argument("latitude outside [-90, 90]");
  if (!(longitude >= -180.0 && longitude <= 180.0)) throw std::invalid_argument("longitude outside [-180, 180]");
  if (!std::isfinite(altitude)) throw std::invalid_argument("altitude is not finite");
}

Vec3 geodetic_to_ecef(const ObserverLocation& obs) {
  const double e2 = kFlattening * (2.0 - kFlattening);
  const double lat = obs.latitude * kDeg;
  const double lon = obs.longitude * kDeg;
  const double sl = std::sin(lat);
  const double n = kWgs84RadiusKm / std::sqrt(1.0 - e2 * sl * sl);
  const double h = obs.altitude / 1000.0;
  return {(n + h) * std::cos(lat) * std::cos(lon), (n + h) * std::cos(lat) * std::sin(lon),
          (n * (1.0 - e2) + h) * sl};
}

ObserverLocation ecef_to_geodetic(const Vec3& r) {
  const double e2 = kFlattening * (2.0 - kFlattening);
  const double p = std::hypot(r[0], r[1]);
  double lat = std::atan2(r[2], p * (1.0 - e2));
  double n = kWgs84RadiusKm;
  for (int i = 0; i < 8; ++i) {
    const double sl = std::sin(lat);
    n = kWgs84RadiusKm / std::sqrt(1.0 - e2 * sl * sl);
    lat = std::atan2(r[2] + n * e2 * sl, p);
  }
  const double sl = std::sin(lat), cl = std::cos(lat);
  n = kWgs84RadiusKm / std::sqrt(1.0 - e2 * sl * sl);
  const double h = std::fabs(cl) > 1e-9 ? p / cl - n : std::fabs(r[2]) - n * (1.0 - e2);
  return {lat / kDeg, std::atan2(r[1], r[0]) / kDeg, h * 1000.0};
}

Vec3 teme_to_ecef(const Vec3& v, Timestamp t) {
  const double theta = gmst(julian_date(t));
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v[0] + s * v[1], -s * v[0] + c * v[1], v[2]};
}

Vec3 ecef_to_teme(const Vec3& v, Timestamp t) {
  const double theta = gmst(julian_date(t));
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]};
}

Topocentric look_angles(const SatelliteState& state, const ObserverLocation& obs) {
  const Vec3 sat = teme_to_ecef(state.position, state.t);
  const Vec3 site = geodetic_to_ecef(obs);
  const Vec3 rho{sat[0] - site[0], sat[1] - site[1], sat[2] - site[2]};
  const LocalBasis b = local_basis(obs);
  const double e = dot(rho, b.east), n = dot(rho, b.north), u = dot(rho, b.up);
  Topocentric topo;
  topo.range = std::sqrt(dot(rho, rho));
  topo.elevation = std::asin(std::clamp(u / topo.range, -1.0, 1.0)) / kDeg;
  double az = std::atan2(e, n) / kDeg;
  if (az < 0.0) az += 360.0;
  if (az >= 360.0) az -= 360.0;
  topo.azimuth = az;
  return topo;
}

Vec3 position_from_look_angles(const ObserverLocation& obs, const Topocentric& topo, Timestamp t) {
  const LocalBasis b = local_basis(obs);
  const double el = topo.elevation * kDeg, az = topo.azimuth * kDeg;
  const double e = std::cos(el) * std::sin(az), n = std::cos(el) * std::cos(az), u = std::sin(el);
  const Vec3 site = geodetic_to_ecef(obs);
  Vec3 ecef{};
  for (int i = 0; i < 3; ++i)
    ecef[i] = site[i] + topo.range * (e * b.east[i] + n * b.north[i] + u * b.up[i]);
  return ecef_to_teme(ecef, t);
}

Vec3 sun_direction(Timestamp t) {
  const double tut1 = (julian_date(t) - 2451545.0) / 36525.0;
  const double mean_long = std::fmod(280.460 + 36000.771 * tut1, 360.0);
  const double mean_anom = std::fmod(357.5291092 + 35999.05034 * tut1, 360.0) * kDeg;
  const double ecl_long =
      (mean_long + 1.914666471 * std::sin(mean_anom) + 0.019994643 * std::sin(2.0 * mean_anom)) * kDeg;
  const double obliquity = (23.439291 - 0.0130042 * tut1) * kDeg;
  return {std::cos(ecl_long), std::cos(obliquity) * std::sin(ecl_long),
          std::sin(obliquity) * std::sin(ecl_long)};
}

bool is_sunlit(const Vec3& p, const Vec3& sun) {
  const double along = dot(p, sun);
  if (along >= 0.0) return true;
  const Vec3 perp{p[0] - along * sun[0], p[1] - along * sun[1], p[2] - along * sun[2]};
  return std::sqrt(dot(perp, perp)) >= kWgs84RadiusKm;
}

bool is_sunlit(const SatelliteState& state, Timestamp t) { return is_sunlit(state.position, sun_direction(t)); }

bool is_sunlit(const SatelliteState& state) { return is_sunlit(state, state.t); }

}  // namespace leosched::orbital
