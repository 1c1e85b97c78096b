#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "leosched/obstruction/map.hpp"

namespace leosched::obstruction {

/// Decodes a P5 (binary) or P2 (ASCII) graymap of exactly 123x123 pixels.
/// Samples at or above half of maxval (128 for maxval 255) are lit.
/// Throws std::invalid_argument on malformed input.
ObstructionMap read_pgm(std::string_view bytes);

/// Binary P5, maxval 255, lit = 255.
std::string write_pgm(const ObstructionMap& map);

/// `<terminal_id>_<slot_index>_<unix_seconds>.pgm`
struct MapFileName {
  std::string terminal_id;
  int slot_index = 0;
  std::int64_t unix_seconds = 0;
};

std::optional<MapFileName> parse_map_filename(std::string_view filename);
std::string format_map_filename(const MapFileName& name);

}  // namespace leosched::obstruction
