#include "leosched/orbital/tle.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace leosched::orbital {

namespace {

/// Parse failure attributed to line 1 or line 2 of an element set.
struct FieldError : std::invalid_argument {
  FieldError(int which, const std::string& what)
      : std::invalid_argument(what), which_line(which) {}
  int which_line;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Columns are 1-based and inclusive, as in the published column layout.
std::string_view columns(std::string_view line, int first, int last) {
  return line.substr(static_cast<std::size_t>(first - 1), static_cast<std::size_t>(last - first + 1));
}

double to_double(std::string_view text, int which, const char* field) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw FieldError(which, std::string("malformed ") + field + " field '" + std::string(text) + "'");
  return value;
}

int to_int(std::string_view text, int which, const char* field, bool allow_blank = false) {
  text = trim(text);
  if (text.empty() && allow_blank) return 0;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw FieldError(which, std::string("malformed ") + field + " field '" + std::string(text) + "'");
  return value;
}

/// Catalog numbers above 99999 use the alpha-5 scheme: a leading letter
/// (I and O skipped) stands for 10..33 ten-thousands.
int parse_catalog_number(std::string_view text, int which) {
  text = trim(text);
  if (!text.empty() && text.front() >= 'A' && text.front() <= 'Z') {
    char c = text.front();
    if (c == 'I' || c == 'O') throw FieldError(which, "malformed catalog number");
    int lead = c - 'A' + 10;
    if (c > 'I') --lead;
    if (c > 'O') --lead;
    return lead * 10000 + to_int(text.substr(1), which, "catalog number");
  }
  return to_int(text, which, "catalog number");
}

/// "28098-4" -> 0.28098e-4, with optional leading sign.
double parse_implied_decimal(std::string_view text, int which, const char* field) {
  text = trim(text);
  if (text.empty()) return 0.0;
  double sign = 1.0;
  if (text.front() == '-' || text.front() == '+') {
    if (text.front() == '-') sign = -1.0;
    text.remove_prefix(1);
  }
  const auto exp_pos = text.find_last_of("+-");
  std::string_view mantissa = text;
  int exponent = 0;
  if (exp_pos != std::string_view::npos && exp_pos > 0) {
    mantissa = text.substr(0, exp_pos);
    exponent = to_int(text.substr(exp_pos + 1), which, field);
    if (text[exp_pos] == '-') exponent = -exponent;
  }
  const std::string digits = "0." + std::string(trim(mantissa));
  return sign * to_double(digits, which, field) * std::pow(10.0, exponent);
}

std::string format_implied_decimal(double value) {
  if (value == 0.0) return " 00000-0";
  const char sign = value < 0 ? '-' : ' ';
  double mag = std::fabs(value);
  int exponent = static_cast<int>(std::floor(std::log10(mag))) + 1;
  long mantissa = std::lround(mag / std::pow(10.0, exponent) * 1e5);
  if (mantissa >= 100000) {
    mantissa /= 10;
    ++exponent;
  }
  if (exponent > 9 || exponent < -9) return " 00000-0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%05ld%c%d", sign, mantissa, exponent < 0 ? '-' : '+', std::abs(exponent));
  return buf;
}

void check_line(std::string_view line, char expected_number, int which) {
  if (line.size() < 69)
    throw FieldError(which, "line " + std::to_string(which) + " shorter than 69 columns");
  if (line[0] != expected_number || line[1] != ' ')
    throw FieldError(which, "line " + std::to_string(which) + " does not start with '" + expected_number + " '");
  const char digit = line[68];
  if (digit < '0' || digit > '9')
    throw FieldError(which, "checksum column is not a digit");
  if (tle_checksum(line) != digit - '0')
    throw FieldError(which, "checksum mismatch (expected " + std::to_string(tle_checksum(line)) + ", found " + digit + ")");
}

Timestamp epoch_timestamp(int year, double day_of_year) {
  using namespace std::chrono;
  const sys_days jan1 = std::chrono::year{year} / January / 1;
  return Timestamp(duration_cast<Micros>(jan1.time_since_epoch())) +
         Micros(static_cast<std::int64_t>(std::llround((day_of_year - 1.0) * 86400e6)));
}

}  // namespace

int tle_checksum(std::string_view line) {
  int sum = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(68, line.size()); ++i) {
    const char c = line[i];
    if (c >= '0' && c <= '9') sum += c - '0';
    else if (c == '-') sum += 1;
  }
  return sum % 10;
}

std::optional<int> designator_year(std::string_view designator) {
  designator = trim(designator);
  if (designator.size() < 2) return std::nullopt;
  int yy = 0;
  auto [ptr, ec] = std::from_chars(designator.data(), designator.data() + 2, yy);
  if (ec != std::errc{} || ptr != designator.data() + 2) return std::nullopt;
  return yy < 57 ? 2000 + yy : 1900 + yy;
}

TleRecord parse_tle(std::string_view line1, std::string_view line2, std::string name) {
  // Trailing columns past 69 (some catalogs append comments) are ignored.
  while (!line1.empty() && (line1.back() == '\r' || line1.back() == '\n')) line1.remove_suffix(1);
  while (!line2.empty() && (line2.back() == '\r' || line2.back() == '\n')) line2.remove_suffix(1);
  check_line(line1, '1', 1);
  check_line(line2, '2', 2);
  line1 = line1.substr(0, 69);
  line2 = line2.substr(0, 69);

  TleRecord r;
  r.name = std::string(trim(name));
  r.norad_id = parse_catalog_number(columns(line1, 3, 7), 1);
  const int id2 = parse_catalog_number(columns(line2, 3, 7), 2);
  if (id2 != r.norad_id) throw FieldError(2, "catalog number differs between lines");
  r.intl_designator = std::string(trim(columns(line1, 10, 17)));

  const int yy = to_int(columns(line1, 19, 20), 1, "epoch year");
  r.epoch_year = yy < 57 ? 2000 + yy : 1900 + yy;
  r.epoch_day = to_double(columns(line1, 21, 32), 1, "epoch day");
  if (r.epoch_day < 1.0 || r.epoch_day >= 367.0) throw FieldError(1, "epoch day out of range");
  r.epoch = epoch_timestamp(r.epoch_year, r.epoch_day);

  r.ndot = to_double(columns(line1, 34, 43), 1, "mean motion derivative");
  r.nddot = parse_implied_decimal(columns(line1, 45, 52), 1, "second derivative");
  r.bstar = parse_implied_decimal(columns(line1, 54, 61), 1, "bstar");
  r.element_number = to_int(columns(line1, 65, 68), 1, "element number", true);

  r.inclination = to_double(columns(line2, 9, 16), 2, "inclination");
  r.raan = to_double(columns(line2, 18, 25), 2, "raan");
  r.eccentricity = to_double("0." + std::string(trim(columns(line2, 27, 33))), 2, "eccentricity");
  r.arg_perigee = to_double(columns(line2, 35, 42), 2, "argument of perigee");
  r.mean_anomaly = to_double(columns(line2, 44, 51), 2, "mean anomaly");
  r.mean_motion = to_double(columns(line2, 53, 63), 2, "mean motion");
  r.rev_number = to_int(columns(line2, 64, 68), 2, "revolution number", true);

  if (r.mean_motion <= 0.0) throw FieldError(2, "mean motion must be positive");
  if (r.eccentricity < 0.0 || r.eccentricity >= 1.0) throw FieldError(2, "eccentricity out of range");
  if (r.inclination < 0.0 || r.inclination > 180.0) throw FieldError(2, "inclination out of range");

  r.line1 = std::string(line1);
  r.line2 = std::string(line2);
  return r;
}

TleCatalog parse_tle_catalog(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }

  TleCatalog out;
  std::string pending_name;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const int number = static_cast<int>(i) + 1;
    if (trim(line).empty() || line.front() == '#') continue;

    if (line.size() >= 2 && line[0] == '1' && line[1] == ' ') {
      std::size_t j = i + 1;
      if (j >= lines.size() || lines[j].size() < 2 || lines[j][0] != '2' || lines[j][1] != ' ') {
        out.errors.push_back({number, "truncated element set: line 1 without a following line 2"});
        pending_name.clear();
        continue;
      }
      try {
        out.records.push_back(parse_tle(line, lines[j], pending_name));
      } catch (const FieldError& e) {
        out.errors.push_back({e.which_line == 1 ? number : number + 1, e.what()});
      }
      pending_name.clear();
      i = j;
    } else if (line.size() >= 2 && line[0] == '2' && line[1] == ' ') {
      out.errors.push_back({number, "line 2 without a preceding line 1"});
      pending_name.clear();
    } else {
      std::string_view name = trim(line);
      if (name.size() >= 2 && name[0] == '0' && name[1] == ' ') name = trim(name.substr(2));
      pending_name = std::string(name);
    }
  }
  return out;
}

TleRecord format_tle(TleRecord r) {
  if (r.norad_id < 0 || r.norad_id > 99999)
    throw std::invalid_argument("catalog number outside the 5-digit range");
  char ndot[32];
  std::snprintf(ndot, sizeof ndot, "%c.%08ld", r.ndot < 0 ? '-' : ' ', std::lround(std::fabs(r.ndot) * 1e8));
  char l1[80];
  std::snprintf(l1, sizeof l1, "1 %05dU %-8.8s %02d%012.8f %s %s %s 0 %4d", r.norad_id,
                r.intl_designator.c_str(), r.epoch_year % 100, r.epoch_day, ndot,
                format_implied_decimal(r.nddot).c_str(), format_implied_decimal(r.bstar).c_str(),
                r.element_number % 10000);
  char l2[80];
  std::snprintf(l2, sizeof l2, "2 %05d %8.4f %8.4f %07ld %8.4f %8.4f %11.8f%5d", r.norad_id,
                r.inclination, r.raan, std::lround(r.eccentricity * 1e7), r.arg_perigee,
                r.mean_anomaly, r.mean_motion, r.rev_number % 100000);
  std::string line1 = l1;
  std::string line2 = l2;
  line1 += static_cast<char>('0' + tle_checksum(line1));
  line2 += static_cast<char>('0' + tle_checksum(line2));
  // Re-parse so the record reflects exactly what the text encodes.
  return parse_tle(line1, line2, r.name);
}

}  // namespace leosched::orbital
