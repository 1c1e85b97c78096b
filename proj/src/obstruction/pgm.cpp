#include "leosched/obstruction/pgm.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

namespace leosched::obstruction {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int next_int(const char* what) {
    skip_space_and_comments();
    int value = 0;
    auto [ptr, ec] = std::from_chars(bytes_.data() + pos_, bytes_.data() + bytes_.size(), value);
    if (ec != std::errc{}) throw std::invalid_argument(std::string("PGM: cannot read ") + what);
    pos_ = static_cast<std::size_t>(ptr - bytes_.data());
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ObstructionMap read_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
    throw std::invalid_argument("PGM: missing P5/P2 magic number");
  const bool binary = bytes[1] == '5';
  HeaderReader in(bytes);
  in.advance(2);
  const int width = in.next_int("width");
  const int height = in.next_int("height");
  const int maxval = in.next_int("maxval");
  if (width != kMapSize || height != kMapSize)
    throw std::invalid_argument("PGM: expected 123x123, got " + std::to_string(width) + "x" + std::to_string(height));
  if (maxval <= 0 || maxval > 65535) throw std::invalid_argument("PGM: maxval out of range");

  ObstructionMap map;
  const auto lit = [maxval](int v) { return 2 * v >= maxval + 1; };
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    if (in.pos() >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[in.pos()])))
      throw std::invalid_argument("PGM: malformed header");
    std::size_t pos = in.pos() + 1;
    const std::size_t sample = maxval > 255 ? 2 : 1;
    if (bytes.size() - pos < sample * kMapSize * kMapSize) throw std::invalid_argument("PGM: raster truncated");
    for (int row = 0; row < kMapSize; ++row)
      for (int col = 0; col < kMapSize; ++col) {
        int v = static_cast<unsigned char>(bytes[pos]);
        if (sample == 2) v = (v << 8) | static_cast<unsigned char>(bytes[pos + 1]);
        pos += sample;
        map.set({col, row}, lit(v));
      }
  } else {
    for (int row = 0; row < kMapSize; ++row)
      for (int col = 0; col < kMapSize; ++col) {
        const int v = in.next_int("sample");
        if (v < 0 || v > maxval) throw std::invalid_argument("PGM: sample exceeds maxval");
        map.set({col, row}, lit(v));
      }
  }
  return map;
}

std::string write_pgm(const ObstructionMap& map) {
  std::string out = "P5\n123 123\n255\n";
  out.reserve(out.size() + kMapSize * kMapSize);
  for (int row = 0; row < kMapSize; ++row)
    for (int col = 0; col < kMapSize; ++col) out.push_back(map.at({col, row}) ? '\xff' : '\0');
  return out;
}

std::optional<MapFileName> parse_map_filename(std::string_view filename) {
  const auto slash = filename.find_last_of('/');
  if (slash != std::string_view::npos) filename.remove_prefix(slash + 1);
  if (filename.size() < 4 || filename.substr(filename.size() - 4) != ".pgm") return std::nullopt;
  filename.remove_suffix(4);
  const auto last = filename.rfind('_');
  if (last == std::string_view::npos || last == 0) return std::nullopt;
  const auto middle = filename.rfind('_', last - 1);
  if (middle == std::string_view::npos || middle == 0) return std::nullopt;

  MapFileName name;
  name.terminal_id = std::string(filename.substr(0, middle));
  const auto slot = filename.substr(middle + 1, last - middle - 1);
  const auto secs = filename.substr(last + 1);
  auto r1 = std::from_chars(slot.data(), slot.data() + slot.size(), name.slot_index);
  auto r2 = std::from_chars(secs.data(), secs.data() + secs.size(), name.unix_seconds);
  if (slot.empty() || secs.empty() || r1.ec != std::errc{} || r1.ptr != slot.data() + slot.size() ||
      r2.ec != std::errc{} || r2.ptr != secs.data() + secs.size() || name.slot_index < 0)
    return std::nullopt;
  return name;
}

std::string format_map_filename(const MapFileName& name) {
  return name.terminal_id + "_" + std::to_string(name.slot_index) + "_" + std::to_string(name.unix_seconds) + ".pgm";
}

}  // namespace leosched::obstruction
