#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "leosched/simulator/simulator.hpp"

namespace leosched::simulator {

namespace {

constexpr double kGm = 398600.4418;  // km^3/s^2, WGS-84
constexpr double kEarthRadius = 6378.137;

/// Piece letters skip I and O: A..Z (24 letters), then AA, AB, ...
std::string piece_code(int index) {
  static const char* kLetters = "ABCDEFGHJKLMNPQRSTUVWXYZ";
  std::string out;
  ++index;
  while (index > 0) {
    --index;
    out.insert(out.begin(), kLetters[index % 24]);
    index /= 24;
  }
  return out;
}

}  // namespace

double mean_motion_for_altitude(double altitude_km) {
  const double a = kEarthRadius + altitude_km;
  const double period_s = 2.0 * std::numbers::pi * std::sqrt(a * a * a / kGm);
  return 86400.0 / period_s;
}

GeneratedConstellation generate_constellation(const ConstellationSpec& spec) {
  using namespace std::chrono;
  if (spec.shells.empty()) throw std::invalid_argument("constellation needs at least one shell");
  int total = 0;
  for (std::size_t i = 0; i < spec.shells.size(); ++i) {
    const auto& s = spec.shells[i];
    const std::string where = "shell " + std::to_string(i) + ": ";
    if (s.count <= 0 || s.planes <= 0) throw std::invalid_argument(where + "count and planes must be positive");
    if (s.count % s.planes != 0) throw std::invalid_argument(where + "count must be divisible by planes");
    if (s.altitude_km < 200.0 || s.altitude_km > 2000.0)
      throw std::invalid_argument(where + "altitude must lie in [200, 2000] km");
    if (s.inclination < 0.0 || s.inclination > 180.0) throw std::invalid_argument(where + "inclination outside [0, 180]");
    if (s.phasing < 0 || s.phasing >= s.planes) throw std::invalid_argument(where + "phasing must lie in [0, planes)");
    total += s.count;
  }
  if (spec.launches.count <= 0 || spec.launches.spacing_days < 0)
    throw std::invalid_argument("launch plan needs a positive count and non-negative spacing");
  if (spec.first_norad_id <= 0 || spec.first_norad_id + total > 99999)
    throw std::invalid_argument("NORAD ids would leave the 5-digit range");

  // Deal satellites to launches in a seeded random order.
  std::vector<int> order(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) order[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> launch_of(static_cast<std::size_t>(total));
  for (int k = 0; k < total; ++k) launch_of[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k % spec.launches.count;

  // Launch designators: sequential launch numbers within each calendar year.
  std::vector<sys_days> launch_date(static_cast<std::size_t>(spec.launches.count));
  std::vector<std::string> launch_prefix(launch_date.size());
  int year_of_previous = 0, number_in_year = 0;
  for (int k = 0; k < spec.launches.count; ++k) {
    launch_date[static_cast<std::size_t>(k)] = spec.launches.first + days(k * spec.launches.spacing_days);
    const int y = int(year_month_day{launch_date[static_cast<std::size_t>(k)]}.year());
    number_in_year = y == year_of_previous ? number_in_year + 1 : 1;
    year_of_previous = y;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d%03d", y % 100, number_in_year % 1000);
    launch_prefix[static_cast<std::size_t>(k)] = buf;
  }
  std::vector<int> pieces(launch_date.size(), 0);

  const auto epoch_day = floor<days>(spec.epoch);
  const year_month_day ymd{epoch_day};
  const sys_days jan1 = ymd.year() / January / 1;
  const double doy = 1.0 + static_cast<double>((spec.epoch - Timestamp(jan1)).count()) / 86400e6;

  GeneratedConstellation out;
  out.tles.reserve(static_cast<std::size_t>(total));
  int index = 0;
  for (const auto& shell : spec.shells) {
    const int per_plane = shell.count / shell.planes;
    const double n = mean_motion_for_altitude(shell.altitude_km);
    for (int p = 0; p < shell.planes; ++p) {
      for (int s = 0; s < per_plane; ++s, ++index) {
        const int launch = launch_of[static_cast<std::size_t>(index)];
        orbital::TleRecord r;
        r.norad_id = spec.first_norad_id + index;
        r.name = "SIM-" + std::to_string(r.norad_id);
        r.intl_designator = launch_prefix[static_cast<std::size_t>(launch)] + piece_code(pieces[static_cast<std::size_t>(launch)]++);
        r.epoch_year = int(ymd.year());
        r.epoch_day = doy;
        r.mean_motion = n;
        r.eccentricity = 1e-4;
        r.inclination = shell.inclination;
        r.raan = std::fmod(360.0 * p / shell.planes, 360.0);
        r.arg_perigee = 0.0;
        r.mean_anomaly = std::fmod(360.0 * s / per_plane + 360.0 * shell.phasing * p / shell.count, 360.0);
        r.element_number = 999;
        out.tles.push_back(orbital::format_tle(r));
        out.launches.add(r.norad_id, launch_date[static_cast<std::size_t>(launch)]);
      }
    }
  }
  return out;
}

std::string to_tle_text(std::span<const orbital::TleRecord> tles) {
  std::ostringstream os;
  for (const auto& r : tles) {
    if (!r.name.empty()) os << r.name << '\n';
    os << r.line1 << '\n' << r.line2 << '\n';
  }
  return os.str();
}

}  // namespace leosched::simulator
