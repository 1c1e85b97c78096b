#include "leosched/analytics/records.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace leosched::analytics {

using nlohmann::json;

const orbital::SatelliteSnapshot* SlotRecord::selected_snapshot() const {
  if (!selected) return nullptr;
  auto it = std::find_if(available.begin(), available.end(),
                         [this](const orbital::SatelliteSnapshot& s) { return s.norad_id == *selected; });
  return it == available.end() ? nullptr : &*it;
}

void SlotRecord::validate() const {
  if (available.empty()) throw std::invalid_argument("record has no available satellites");
  if (selected && !selected_snapshot())
    throw std::invalid_argument("selected satellite " + std::to_string(*selected) + " is not among the available");
  for (const auto& s : available) {
    if (s.t != slot_start) throw std::invalid_argument("snapshot time differs from slot start");
    if (s.age_days < 0.0) throw std::invalid_argument("negative satellite age");
    if (!(s.topo.azimuth >= 0.0 && s.topo.azimuth < 360.0)) throw std::invalid_argument("azimuth outside [0, 360)");
  }
}

std::string to_json_line(const SlotRecord& r) {
  json available = json::array();
  for (const auto& s : r.available)
    available.push_back({{"norad_id", s.norad_id},
                         {"elevation", s.topo.elevation},
                         {"azimuth", s.topo.azimuth},
                         {"range_km", s.topo.range},
                         {"age_days", s.age_days},
                         {"sunlit", s.sunlit}});
  json j = {{"terminal_id", r.terminal_id}, {"slot_start", format_iso(r.slot_start)}, {"available", available}};
  j["selected"] = r.selected ? json(*r.selected) : json(nullptr);
  return j.dump();
}

SlotRecord slot_record_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    SlotRecord r;
    r.terminal_id = j.at("terminal_id").get<std::string>();
    r.slot_start = parse_iso(j.at("slot_start").get<std::string>());
    for (const auto& a : j.at("available")) {
      orbital::SatelliteSnapshot s;
      s.norad_id = a.at("norad_id").get<int>();
      s.t = r.slot_start;
      s.topo.elevation = a.at("elevation").get<double>();
      s.topo.azimuth = a.at("azimuth").get<double>();
      s.topo.range = a.value("range_km", 0.0);
      s.age_days = a.at("age_days").get<double>();
      s.sunlit = a.at("sunlit").get<bool>();
      r.available.push_back(s);
    }
    if (j.contains("selected") && !j.at("selected").is_null()) r.selected = j.at("selected").get<int>();
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed slot record: ") + e.what());
  }
}

RecordLoad parse_slot_records(std::string_view jsonl) {
  RecordLoad out;
  int line_no = 0;
  while (!jsonl.empty()) {
    const auto nl = jsonl.find('\n');
    std::string_view line = jsonl.substr(0, nl);
    jsonl.remove_prefix(nl == std::string_view::npos ? jsonl.size() : nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      SlotRecord r = slot_record_from_json(line);
      if (!r.selected) {
        ++out.skipped_unselected;
        continue;
      }
      r.validate();
      out.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      out.errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace leosched::analytics
