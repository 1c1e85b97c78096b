#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace leosched {

/// UTC instant with microsecond resolution. Leap seconds are ignored, as in
/// POSIX time.
using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;
using Micros = std::chrono::microseconds;

Timestamp from_unix_seconds(double seconds);
Timestamp from_unix_millis(std::int64_t millis);
double to_unix_seconds(Timestamp t);
std::int64_t to_unix_millis(Timestamp t);

/// Julian date (UT1 approximated by UTC).
double julian_date(Timestamp t);

/// Seconds elapsed from `a` to `b`.
double seconds_between(Timestamp a, Timestamp b);

inline Timestamp add_seconds(Timestamp t, double seconds) {
  return t + Micros(static_cast<std::int64_t>(std::llround(seconds * 1e6)));
}

/// "YYYY-MM-DDTHH:MM:SS[.ffffff]Z". Fractional digits are emitted only when
/// the instant is not on a whole second.
std::string format_iso(Timestamp t);

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.f...]]" with optional "Z".
/// Throws std::invalid_argument on malformed input.
Timestamp parse_iso(std::string_view text);

/// Calendar date of `t` (UTC).
std::chrono::year_month_day utc_date(Timestamp t);

}  // namespace leosched
