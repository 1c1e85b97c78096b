#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "leosched/orbital/geodesy.hpp"
#include "leosched/orbital/launch.hpp"
#include "leosched/orbital/visibility.hpp"

using namespace leosched;
using namespace leosched::orbital;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

SatelliteState state_at(const Vec3& teme, Timestamp t) {
  SatelliteState s;
  s.t = t;
  s.position = teme;
  return s;
}

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  // Rodrigues' formula, axis unit length.
  const double c = std::cos(angle), s = std::sin(angle);
  const double d = axis[0] * v[0] + axis[1] * v[1] + axis[2] * v[2];
  const Vec3 cross{axis[1] * v[2] - axis[2] * v[1], axis[2] * v[0] - axis[0] * v[2],
                   axis[0] * v[1] - axis[1] * v[0]};
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = v[i] * c + cross[i] * s + axis[i] * d * (1 - c);
  return out;
}

}  // namespace

TEST_CASE("satellite straight above the observer") {
  const ObserverLocation obs{47.6, -122.3, 120.0};
  const Timestamp t = parse_iso("2022-03-20T18:00:12Z");
  const double lat = obs.latitude * kDeg, lon = obs.longitude * kDeg;
  const Vec3 up{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
  const Vec3 site = geodetic_to_ecef(obs);
  const double h = 550.0;
  const Vec3 ecef{site[0] + h * up[0], site[1] + h * up[1], site[2] + h * up[2]};
  const Topocentric topo = look_angles(state_at(ecef_to_teme(ecef, t), t), obs);
  CHECK(topo.elevation == doctest::Approx(90.0).epsilon(1e-9));
  CHECK(topo.range == doctest::Approx(h).epsilon(1e-9));
}

TEST_CASE("horizon point due north") {
  const ObserverLocation obs{35.0, 10.0, 0.0};
  const Timestamp t = parse_iso("2022-01-01T00:00:00Z");
  const double lat = obs.latitude * kDeg, lon = obs.longitude * kDeg;
  const Vec3 north{-std::sin(lat) * std::cos(lon), -std::sin(lat) * std::sin(lon), std::cos(lat)};
  const Vec3 site = geodetic_to_ecef(obs);
  const Vec3 ecef{site[0] + 1000 * north[0], site[1] + 1000 * north[1], site[2] + 1000 * north[2]};
  const Topocentric topo = look_angles(state_at(ecef_to_teme(ecef, t), t), obs);
  CHECK(std::fabs(topo.elevation) < 1e-6);
  CHECK((topo.azimuth < 0.5 || topo.azimuth > 359.5));
}

TEST_CASE("equatorial satellite slightly east of an equatorial observer") {
  const ObserverLocation obs{0.0, 0.0, 0.0};
  const Timestamp t = parse_iso("2022-06-01T06:00:00Z");
  const double r = kWgs84RadiusKm + 550.0;
  const Vec3 ecef{r * std::cos(5 * kDeg), r * std::sin(5 * kDeg), 0.0};
  const Topocentric topo = look_angles(state_at(ecef_to_teme(ecef, t), t), obs);
  CHECK(topo.azimuth > 45.0);
  CHECK(topo.azimuth < 135.0);
  CHECK(topo.elevation > 0.0);
}

TEST_CASE("look angles invert position_from_look_angles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-180.0, 180.0), el(-10.0, 89.9),
      az(0.0, 360.0), range(300.0, 3000.0);
  for (int i = 0; i < 2000; ++i) {
    const ObserverLocation obs{lat(rng), lon(rng), 50.0};
    const Topocentric want{el(rng), az(rng), range(rng)};
    const Timestamp t = parse_iso("2022-03-20T00:00:00Z") + std::chrono::seconds(i * 997);
    const Topocentric got = look_angles(state_at(position_from_look_angles(obs, want, t), t), obs);
    CHECK(std::fabs(got.elevation - want.elevation) < 1e-6);
    double daz = std::fabs(got.azimuth - want.azimuth);
    daz = std::min(daz, 360.0 - daz);
    CHECK(daz < 1e-6);
    CHECK(got.azimuth >= 0.0);
    CHECK(got.azimuth < 360.0);
  }
}

TEST_CASE("ecef and geodetic conversions agree") {
  const ObserverLocation obs{-33.9, 151.2, 2500.0};
  const ObserverLocation back = ecef_to_geodetic(geodetic_to_ecef(obs));
  CHECK(back.latitude == doctest::Approx(obs.latitude).epsilon(1e-10));
  CHECK(back.longitude == doctest::Approx(obs.longitude).epsilon(1e-10));
  CHECK(back.altitude == doctest::Approx(obs.altitude).epsilon(1e-6));
}

TEST_CASE("observer validation") {
  CHECK_THROWS_AS(ObserverLocation({91.0, 0.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ObserverLocation({0.0, 181.0, 0.0}).validate(), std::invalid_argument);
  CHECK_NOTHROW(ObserverLocation({-90.0, -180.0, -50.0}).validate());
}

TEST_CASE("cylindrical umbra") {
  const Vec3 sun{1.0, 0.0, 0.0};
  const double r = kWgs84RadiusKm + 550.0;
  CHECK(is_sunlit(Vec3{r, 0.0, 0.0}, sun));
  CHECK(is_sunlit(Vec3{0.0, r, 0.0}, sun));
  CHECK_FALSE(is_sunlit(Vec3{-r, 0.0, 0.0}, sun));
  CHECK(is_sunlit(Vec3{-r, 7000.0, 0.0}, sun));
  CHECK_FALSE(is_sunlit(Vec3{-r, 6000.0, 0.0}, sun));
}

TEST_CASE("umbra test is invariant under rotation about the sun axis") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), angle(0.0, 2 * std::numbers::pi), rad(6500.0, 8500.0);
  for (int i = 0; i < 5000; ++i) {
    Vec3 sun{u(rng), u(rng), u(rng)};
    const double n = std::hypot(sun[0], sun[1], sun[2]);
    for (auto& c : sun) c /= n;
    Vec3 p{u(rng), u(rng), u(rng)};
    const double pn = std::hypot(p[0], p[1], p[2]);
    const double rr = rad(rng);
    for (auto& c : p) c *= rr / pn;
    CHECK(is_sunlit(p, sun) == is_sunlit(rotate(p, sun, angle(rng)), sun));
  }
}

TEST_CASE("sun direction tracks the seasons") {
  // Near the June solstice the sun sits ~23.4 deg north of the equator.
  const Vec3 june = sun_direction(parse_iso("2022-06-21T09:00:00Z"));
  CHECK(std::asin(june[2]) / kDeg == doctest::Approx(23.43).epsilon(0.01));
  // Near the March equinox it crosses the equator heading toward +x.
  const Vec3 march = sun_direction(parse_iso("2022-03-20T15:33:00Z"));
  CHECK(std::fabs(std::asin(march[2]) / kDeg) < 0.05);
  CHECK(march[0] > 0.999);
}

TEST_CASE("satellite age and launch bins") {
  LaunchCatalog cat = LaunchCatalog::parse_csv("norad_id,launch_date\n45178,2020-03-18\n");
  const Timestamp launch = parse_iso("2020-03-18T00:00:00Z");
  CHECK(satellite_age(45178, "20019A", cat, launch) == 0.0);
  CHECK(satellite_age(45178, "20019A", cat, parse_iso("2020-03-28T00:00:00Z")) == doctest::Approx(10.0));
  const LaunchBin bin = launch_bin(45178, "20019A", cat);
  CHECK(bin.year == 2020);
  CHECK(bin.month == 3);
  CHECK_FALSE(bin.low_precision);

  const LaunchBin fallback = launch_bin(45999, "20019BD", cat);
  CHECK(fallback.year == 2020);
  CHECK(fallback.month == 1);
  CHECK(fallback.low_precision);

  CHECK_THROWS_AS(launch_bin(45999, "", cat), std::invalid_argument);
  CHECK_THROWS_AS(LaunchCatalog::parse_csv("id,date\n1,2020-01-01\n"), std::invalid_argument);
  CHECK_THROWS_AS(LaunchCatalog::parse_csv("norad_id,launch_date\n1,2020-02-30\n"), std::invalid_argument);
  CHECK(LaunchCatalog::parse_csv(cat.to_csv()).entries() == cat.entries());
}
