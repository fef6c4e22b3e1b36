#include "hybridsim/address.hpp"

#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

namespace hybridsim {

namespace {

unsigned parse_number(std::string_view text, unsigned max, std::string_view whole) {
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || value > max) {
    throw std::invalid_argument(fmt::format("malformed address '{}'", whole));
  }
  return value;
}

}  // namespace

Ipv4 Ipv4::parse(std::string_view text) {
  std::uint32_t value = 0;
  std::string_view rest = text;
  for (int i = 0; i < 4; ++i) {
    auto dot = rest.find('.');
    if ((i < 3) == (dot == std::string_view::npos)) throw std::invalid_argument(fmt::format("malformed address '{}'", text));
    std::string_view octet = rest.substr(0, dot);
    value = (value << 8) | parse_number(octet, 255, text);
    rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
  }
  return Ipv4(value);
}

std::string Ipv4::to_string() const {
  return fmt::format("{}.{}.{}.{}", value >> 24, (value >> 16) & 0xff, (value >> 8) & 0xff, value & 0xff);
}

Prefix Prefix::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Prefix(Ipv4::parse(text), 32);
  auto len = static_cast<std::uint8_t>(parse_number(text.substr(slash + 1), 32, text));
  Ipv4 addr = Ipv4::parse(text.substr(0, slash));
  if ((addr.value & ~mask_for(len)) != 0) throw std::invalid_argument(fmt::format("prefix '{}' has host bits set", text));
  return Prefix(addr, len);
}

std::string Prefix::to_string() const { return fmt::format("{}/{}", address.to_string(), length); }

}  // namespace hybridsim
