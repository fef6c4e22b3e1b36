#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hybridsim {

struct Ipv4 {
  std::uint32_t value = 0;

  constexpr Ipv4() = default;
  constexpr explicit Ipv4(std::uint32_t v) : value(v) {}
  static constexpr Ipv4 from_octets(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    return Ipv4((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d);
  }
  /// Dotted quad; throws std::invalid_argument on malformed input.
  static Ipv4 parse(std::string_view text);
  std::string to_string() const;

  constexpr auto operator<=>(const Ipv4&) const = default;
};

struct Prefix {
  Ipv4 address;  // host bits are always zero
  std::uint8_t length = 0;

  constexpr Prefix() = default;
  constexpr Prefix(Ipv4 addr, std::uint8_t len) : address(Ipv4(addr.value & mask_for(len))), length(len) {}

  /// "a.b.c.d/len"; a bare address parses as /32.
  static Prefix parse(std::string_view text);
  std::string to_string() const;

  static constexpr std::uint32_t mask_for(std::uint8_t len) {
    return len == 0 ? 0u : (len >= 32 ? 0xffffffffu : ~((1u << (32 - len)) - 1u));
  }
  constexpr bool contains(Ipv4 a) const { return (a.value & mask_for(length)) == address.value; }

  constexpr auto operator<=>(const Prefix&) const = default;
};

}  // namespace hybridsim
