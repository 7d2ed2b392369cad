#include "batchlens/color.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace batchlens {

namespace {

std::uint8_t lerp_channel(std::uint8_t from, std::uint8_t to, double t) {
  const double v = static_cast<double>(from) + (static_cast<double>(to) - static_cast<double>(from)) * t;
  // std::round rounds half away from zero.
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

Color lerp(const Color& a, const Color& b, double t) {
  return {lerp_channel(a.r, b.r, t), lerp_channel(a.g, b.g, t), lerp_channel(a.b, b.b, t)};
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string Color::hex() const {
  std::array<char, 8> buf{};
  std::snprintf(buf.data(), buf.size(), "#%02X%02X%02X", r, g, b);
  return std::string(buf.data(), 7);
}

std::optional<Color> Color::from_hex(std::string_view text) {
  if (text.size() != 7 || text[0] != '#') return std::nullopt;
  std::array<std::uint8_t, 3> ch{};
  for (std::size_t i = 0; i < 3; ++i) {
    const int hi = hex_digit(text[1 + 2 * i]);
    const int lo = hex_digit(text[2 + 2 * i]);
    if (hi < 0 || lo < 0) return std::nullopt;
    ch[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Color{ch[0], ch[1], ch[2]};
}

Color color_for(std::optional<double> value) {
  if (!value || std::isnan(*value)) return kColorNoData;
  const double v = std::clamp(*value, 0.0, 100.0);
  if (v <= 50.0) return lerp(kColorLow, kColorMid, v / 50.0);
  return lerp(kColorMid, kColorHigh, (v - 50.0) / 50.0);
}

}  // namespace batchlens
