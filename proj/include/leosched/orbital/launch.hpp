#pragma once

#include <chrono>
#include <map>
#include <tuple>
#include <string>
#include <string_view>

#include "leosched/time.hpp"

namespace leosched::orbital {

/// NORAD id -> launch date, loaded from `norad_id,launch_date` CSV.
class LaunchCatalog {
 public:
  LaunchCatalog() = default;

  /// Throws std::invalid_argument naming the offending line.
  static LaunchCatalog parse_csv(std::string_view text);
  std::string to_csv() const;

  void add(int norad_id, std::chrono::sys_days date) { dates_[norad_id] = date; }
  const std::chrono::sys_days* find(int norad_id) const;
  std::size_t size() const { return dates_.size(); }
  const std::map<int, std::chrono::sys_days>& entries() const { return dates_; }

 private:
  std::map<int, std::chrono::sys_days> dates_;
};

struct LaunchBin {
  int year = 0;
  unsigned month = 0;
  bool low_precision = false;  // month unknown, derived from the designator year

  auto operator<=>(const LaunchBin& o) const { return std::tie(year, month) <=> std::tie(o.year, o.month); }
  bool operator==(const LaunchBin& o) const { return year == o.year && month == o.month; }
};

struct LaunchInfo {
  std::chrono::sys_days date{};
  bool low_precision = false;
};

/// Launch date from the catalog, falling back to January 1 of the year in
/// the international designator. Throws std::invalid_argument when neither
/// source resolves.
LaunchInfo resolve_launch(int norad_id, std::string_view intl_designator, const LaunchCatalog& catalog);

/// Fractional days since launch, clamped at zero.
double satellite_age(int norad_id, std::string_view intl_designator, const LaunchCatalog& catalog, Timestamp t);
double age_days(const LaunchInfo& launch, Timestamp t);

LaunchBin launch_bin(int norad_id, std::string_view intl_designator, const LaunchCatalog& catalog);
LaunchBin to_bin(const LaunchInfo& launch);

}  // namespace leosched::orbital
