#include "leosched/model/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace leosched::model {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

// z-scores that are integers in exact arithmetic can land a hair below the
// integer in floating point; nudge them back before truncating.
constexpr double kSnap = 1e-9;

std::vector<int> quantized(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n);
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  std::vector<int> out(v.size(), 0);
  if (!(sd > 1e-12 * std::max(1.0, scale))) return out;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = quantize_z((v[i] - mean) / sd);
  return out;
}

json key_json(const ClusterKey& k) { return json::array({k.z_theta, k.z_phi, k.z_age, k.sunlit}); }

ClusterKey key_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("cluster key must be an array of 4 integers");
  ClusterKey k{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
  for (int z : {k.z_theta, k.z_phi, k.z_age})
    if (z < -3 || z > 3) throw std::invalid_argument("cluster key component outside [-3, 3]");
  if (k.sunlit != 0 && k.sunlit != 1) throw std::invalid_argument("cluster key sunlit flag must be 0 or 1");
  return k;
}

}  // namespace

std::string to_string(const ClusterKey& k) {
  return "(" + std::to_string(k.z_theta) + "," + std::to_string(k.z_phi) + "," + std::to_string(k.z_age) + "," +
         std::to_string(k.sunlit) + ")";
}

int quantize_z(double z) {
  const double snapped = z + (z > 0 ? kSnap : z < 0 ? -kSnap : 0.0);
  return static_cast<int>(std::clamp(std::trunc(snapped), -3.0, 3.0));
}

std::vector<ClusterKey> cluster_keys(std::span<const orbital::SatelliteSnapshot> cohort) {
  if (cohort.size() < 2) throw std::invalid_argument("cluster assignment needs a cohort of at least 2 satellites");
  double s = 0.0, c = 0.0;
  for (const auto& x : cohort) {
    s += std::sin(x.topo.azimuth * kDeg);
    c += std::cos(x.topo.azimuth * kDeg);
  }
  const double circular_mean = std::atan2(s, c) / kDeg;
  std::vector<double> theta, phi, age;
  for (const auto& x : cohort) {
    double d = std::fmod(x.topo.azimuth - circular_mean, 360.0);
    if (d > 180.0) d -= 360.0;
    if (d <= -180.0) d += 360.0;
    theta.push_back(circular_mean + d);
    phi.push_back(x.topo.elevation);
    age.push_back(x.age_days);
  }
  const auto zt = quantized(theta), zp = quantized(phi), za = quantized(age);
  std::vector<ClusterKey> out;
  out.reserve(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) out.push_back({zt[i], zp[i], za[i], cohort[i].sunlit ? 1 : 0});
  return out;
}

ClusterKey cluster_assign(const orbital::SatelliteSnapshot& snapshot, std::span<const orbital::SatelliteSnapshot> cohort) {
  const auto it = std::find_if(cohort.begin(), cohort.end(), [&](const auto& s) { return s.norad_id == snapshot.norad_id; });
  if (it == cohort.end()) throw std::invalid_argument("satellite " + std::to_string(snapshot.norad_id) + " is not in the cohort");
  return cluster_keys(cohort)[static_cast<std::size_t>(it - cohort.begin())];
}

int local_minutes(Timestamp t, int tz_offset_minutes) {
  const auto minutes = std::chrono::floor<std::chrono::minutes>(t).time_since_epoch().count() + tz_offset_minutes;
  return static_cast<int>(((minutes % 1440) + 1440) % 1440);
}

LabeledSlot featurize(const analytics::SlotRecord& record, int tz_offset_minutes) {
  record.validate();
  if (!record.selected) throw std::invalid_argument("record has no selection");
  const auto keys = cluster_keys(record.available);
  LabeledSlot out;
  out.terminal_id = record.terminal_id;
  out.slot_start = record.slot_start;
  out.features.t_local = local_minutes(record.slot_start, tz_offset_minutes);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    ++out.features.counts[keys[i]];
    if (record.available[i].norad_id == *record.selected) out.label = keys[i];
  }
  return out;
}

std::string to_json_line(const LabeledSlot& slot) {
  json counts = json::array();
  for (const auto& [k, n] : slot.features.counts) counts.push_back({{"key", key_json(k)}, {"count", n}});
  json j = {{"terminal_id", slot.terminal_id},
            {"slot_start", format_iso(slot.slot_start)},
            {"t_local", slot.features.t_local},
            {"counts", counts},
            {"label", key_json(slot.label)}};
  return j.dump();
}

LabeledSlot labeled_slot_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  try {
    LabeledSlot s;
    s.terminal_id = j.value("terminal_id", "");
    if (j.contains("slot_start")) s.slot_start = parse_iso(j.at("slot_start").get<std::string>());
    s.features.t_local = j.at("t_local").get<int>();
    if (s.features.t_local < 0 || s.features.t_local > 1439) throw std::invalid_argument("t_local outside [0, 1439]");
    for (const auto& c : j.at("counts")) {
      const int n = c.at("count").get<int>();
      if (n < 1) throw std::invalid_argument("cluster counts must be at least 1");
      if (!s.features.counts.emplace(key_from_json(c.at("key")), n).second)
        throw std::invalid_argument("duplicate cluster key");
    }
    s.label = key_from_json(j.at("label"));
    if (!s.features.counts.contains(s.label)) throw std::invalid_argument("label is not among the counted clusters");
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad labeled slot: ") + e.what());
  }
}

LabeledLoad parse_labeled_slots(std::string_view jsonl) {
  LabeledLoad out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < jsonl.size()) {
    auto end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const auto line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.slots.push_back(labeled_slot_from_json(line));
    } catch (const std::exception& e) {
      out.errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ClusterKey> baseline_topk(const FeatureVector& features, std::size_t k) {
  std::vector<std::pair<ClusterKey, int>> v(features.counts.begin(), features.counts.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<ClusterKey> out;
  for (std::size_t i = 0; i < v.size() && i < k; ++i) out.push_back(v[i].first);
  return out;
}

}  // namespace leosched::model
