#include "leosched/orbital/launch.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "leosched/orbital/tle.hpp"

namespace leosched::orbital {

using namespace std::chrono;

LaunchCatalog LaunchCatalog::parse_csv(std::string_view text) {
  LaunchCatalog out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.remove_prefix(3);
      if (line != "norad_id,launch_date")
        throw std::invalid_argument("launch catalog line 1: expected header 'norad_id,launch_date'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    const auto where = "launch catalog line " + std::to_string(line_no) + ": ";
    if (comma == std::string_view::npos) throw std::invalid_argument(where + "missing comma");
    int id = 0;
    const auto idtext = line.substr(0, comma);
    auto [ptr, ec] = std::from_chars(idtext.data(), idtext.data() + idtext.size(), id);
    if (ec != std::errc{} || ptr != idtext.data() + idtext.size() || id <= 0)
      throw std::invalid_argument(where + "bad norad_id '" + std::string(idtext) + "'");
    Timestamp ts;
    try {
      ts = parse_iso(line.substr(comma + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
    out.add(id, floor<days>(ts));
  }
  return out;
}

std::string LaunchCatalog::to_csv() const {
  std::ostringstream os;
  os << "norad_id,launch_date\n";
  for (const auto& [id, date] : dates_) {
    const year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()));
    os << id << ',' << buf << '\n';
  }
  return os.str();
}

const sys_days* LaunchCatalog::find(int norad_id) const {
  auto it = dates_.find(norad_id);
  return it == dates_.end() ? nullptr : &it->second;
}

LaunchInfo resolve_launch(int norad_id, std::string_view intl_designator, const LaunchCatalog& catalog) {
  if (const auto* date = catalog.find(norad_id)) return {*date, false};
  if (const auto y = designator_year(intl_designator)) return {sys_days{year{*y} / January / 1}, true};
  throw std::invalid_argument("satellite " + std::to_string(norad_id) +
                              ": not in launch catalog and designator '" + std::string(intl_designator) +
                              "' has no year");
}

double age_days(const LaunchInfo& launch, Timestamp t) {
  const double days_since = static_cast<double>((t - Timestamp(launch.date)).count()) / 86400e6;
  return std::max(0.0, days_since);
}

double satellite_age(int norad_id, std::string_view intl_designator, const LaunchCatalog& catalog, Timestamp t) {
  return age_days(resolve_launch(norad_id, intl_designator, catalog), t);
}

LaunchBin to_bin(const LaunchInfo& launch) {
  const year_month_day ymd{launch.date};
  return {int(ymd.year()), unsigned(ymd.month()), launch.low_precision};
}

LaunchBin launch_bin(int norad_id, std::string_view intl_designator, const LaunchCatalog& catalog) {
  return to_bin(resolve_launch(norad_id, intl_designator, catalog));
}

}  // namespace leosched::orbital
