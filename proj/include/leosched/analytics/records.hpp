#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leosched/orbital/visibility.hpp"

namespace leosched::analytics {

/// One scheduling slot: what the terminal could see and what it was given.
/// `selected` is empty for slots without any visible satellite.
struct SlotRecord {
  std::string terminal_id;
  Timestamp slot_start{};
  std::vector<orbital::SatelliteSnapshot> available;
  std::optional<int> selected;

  const orbital::SatelliteSnapshot* selected_snapshot() const;
  /// Throws std::invalid_argument when the record breaks its invariants.
  void validate() const;
};

std::string to_json_line(const SlotRecord& record);
SlotRecord slot_record_from_json(std::string_view line);

struct RecordLoad {
  std::vector<SlotRecord> records;
  int skipped_unselected = 0;  // well-formed records with no selection
  std::vector<std::string> errors;  // "line N: message"
};

/// Parses SlotRecord JSON-lines. Records without a selection are counted
/// and left out; malformed lines are reported by line number.
RecordLoad parse_slot_records(std::string_view jsonl);

}  // namespace leosched::analytics
