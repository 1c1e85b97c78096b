#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leosched/analytics/records.hpp"

namespace leosched::model {

/// Cohort-relative description of one satellite: signed z-score bins of
/// azimuth, elevation and age, plus illumination.
struct ClusterKey {
  int z_theta = 0;
  int z_phi = 0;
  int z_age = 0;
  int sunlit = 0;
  auto operator<=>(const ClusterKey&) const = default;
};

std::string to_string(const ClusterKey& k);  // "(1,0,2,1)"

/// Keys for every member of the cohort, in cohort order.
/// Throws std::invalid_argument for cohorts smaller than 2.
std::vector<ClusterKey> cluster_keys(std::span<const orbital::SatelliteSnapshot> cohort);

/// Throws std::invalid_argument when `snapshot` is not in the cohort.
ClusterKey cluster_assign(const orbital::SatelliteSnapshot& snapshot, std::span<const orbital::SatelliteSnapshot> cohort);

/// Truncate toward zero, clamp to [-3, 3].
int quantize_z(double z);

struct FeatureVector {
  int t_local = 0;  // minutes since local midnight
  std::map<ClusterKey, int> counts;
};

struct LabeledSlot {
  FeatureVector features;
  ClusterKey label;
  std::string terminal_id;
  Timestamp slot_start{};
};

int local_minutes(Timestamp t, int tz_offset_minutes);

LabeledSlot featurize(const analytics::SlotRecord& record, int tz_offset_minutes);

std::string to_json_line(const LabeledSlot& slot);
LabeledSlot labeled_slot_from_json(std::string_view line);

struct LabeledLoad {
  std::vector<LabeledSlot> slots;
  std::vector<std::string> errors;  // "line N: message"
};
LabeledLoad parse_labeled_slots(std::string_view jsonl);

/// Keys ordered by descending count, lexicographic on ties; at most k.
std::vector<ClusterKey> baseline_topk(const FeatureVector& features, std::size_t k);

}  // namespace leosched::model
