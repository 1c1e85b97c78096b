#include "leosched/time.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace leosched {

using namespace std::chrono;

Timestamp from_unix_seconds(double seconds) {
  return Timestamp(Micros(static_cast<std::int64_t>(std::llround(seconds * 1e6))));
}

Timestamp from_unix_millis(std::int64_t millis) {
  return Timestamp(duration_cast<Micros>(milliseconds(millis)));
}

double to_unix_seconds(Timestamp t) {
  return static_cast<double>(t.time_since_epoch().count()) * 1e-6;
}

std::int64_t to_unix_millis(Timestamp t) {
  return floor<milliseconds>(t).time_since_epoch().count();
}

double julian_date(Timestamp t) {
  return 2440587.5 + to_unix_seconds(t) / 86400.0;
}

double seconds_between(Timestamp a, Timestamp b) {
  return static_cast<double>((b - a).count()) * 1e-6;
}

year_month_day utc_date(Timestamp t) { return year_month_day{floor<days>(t)}; }

std::string format_iso(Timestamp t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[48];
  const auto frac = hms.subseconds().count();
  if (frac == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                  int(hms.minutes().count()), int(hms.seconds().count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                  int(hms.minutes().count()), int(hms.seconds().count()),
                  static_cast<long long>(frac));
  }
  return buf;
}

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw std::invalid_argument("truncated timestamp");
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) throw std::invalid_argument("bad timestamp digits");
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c)
    throw std::invalid_argument(std::string("expected '") + c + "' in timestamp");
}

}  // namespace

Timestamp parse_iso(std::string_view text) {
  try {
    const int y = read_int(text, 0, 4);
    expect(text, 4, '-');
    const int mo = read_int(text, 5, 2);
    expect(text, 7, '-');
    const int d = read_int(text, 8, 2);
    const year_month_day ymd{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
    if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");
    Timestamp t{sys_days{ymd}};
    std::size_t pos = 10;
    if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
      const int hh = read_int(text, pos + 1, 2);
      expect(text, pos + 3, ':');
      const int mm = read_int(text, pos + 4, 2);
      pos += 6;
      int ss = 0;
      std::int64_t micros = 0;
      if (pos < text.size() && text[pos] == ':') {
        ss = read_int(text, pos + 1, 2);
        pos += 3;
        if (pos < text.size() && text[pos] == '.') {
          ++pos;
          std::int64_t scale = 100000;
          while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            micros += (text[pos] - '0') * scale;
            scale /= 10;
            ++pos;
          }
        }
      }
      if (hh > 23 || mm > 59 || ss > 60) throw std::invalid_argument("time of day out of range");
      t += hours(hh) + minutes(mm) + seconds(ss) + Micros(micros);
    }
    if (pos < text.size() && text[pos] == 'Z') ++pos;
    if (pos != text.size()) throw std::invalid_argument("trailing characters in timestamp");
    return t;
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("cannot parse timestamp '" + std::string(text) + "': " + e.what());
  }
}

}  // namespace leosched
