#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace batchlens {

struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  /// "#RRGGBB", uppercase.
  std::string hex() const;
  static std::optional<Color> from_hex(std::string_view text);

  friend bool operator==(const Color&, const Color&) = default;
};

inline constexpr Color kColorLow{0x2C, 0x7B, 0xB6};
inline constexpr Color kColorMid{0xFF, 0xFF, 0xBF};
inline constexpr Color kColorHigh{0xD7, 0x19, 0x1C};
inline constexpr Color kColorNoData{0xBD, 0xBD, 0xBD};

/// Diverging ramp 0 -> kColorLow, 50 -> kColorMid, 100 -> kColorHigh, linear
/// per channel between anchors and rounded half away from zero. Absent (or
/// NaN) values map to kColorNoData; finite values are clamped to [0, 100].
Color color_for(std::optional<double> value);

}  // namespace batchlens
