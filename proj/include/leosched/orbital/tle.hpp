#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leosched/time.hpp"

namespace leosched::orbital {

/// Mean orbital elements of one two-line element set. Angles are degrees.
struct TleRecord {
  std::string name;
  int norad_id = 0;
  std::string intl_designator;  // e.g. "20019BD"
  Timestamp epoch{};
  int epoch_year = 0;         // four-digit
  double epoch_day = 0.0;     // fractional day of year, 1-based
  double mean_motion = 0.0;   // rev/day
  double eccentricity = 0.0;
  double inclination = 0.0;
  double raan = 0.0;
  double arg_perigee = 0.0;
  double mean_anomaly = 0.0;
  double bstar = 0.0;         // 1/earth radii
  double ndot = 0.0;          // rev/day^2 (first derivative / 2, as encoded)
  double nddot = 0.0;         // rev/day^3 (second derivative / 6, as encoded)
  int element_number = 0;
  int rev_number = 0;
  std::string line1;
  std::string line2;
};

struct TleError {
  int line = 0;  // 1-based line number in the input text
  std::string message;
};

struct TleCatalog {
  std::vector<TleRecord> records;
  std::vector<TleError> errors;
};

/// Mod-10 checksum over the first 68 columns: digits count their value,
/// '-' counts 1, everything else 0.
int tle_checksum(std::string_view line);

/// Parses 2-line or name-prefixed 3-line element sets. Lines beginning with
/// '#' are comments. Invalid sets are reported in `errors` with the line
/// number they start on and never silently dropped.
TleCatalog parse_tle_catalog(std::string_view text);

/// Parses a single element set; throws std::invalid_argument on failure.
TleRecord parse_tle(std::string_view line1, std::string_view line2, std::string name = {});

/// Renders the record's elements back into two 69-column lines with valid
/// checksums. The returned record has line1/line2 filled in.
TleRecord format_tle(TleRecord record);

/// Year encoded in an international designator ("20019BD" -> 2020).
std::optional<int> designator_year(std::string_view designator);

}  // namespace leosched::orbital
