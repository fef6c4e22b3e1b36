#include "hybridsim/ecmp_hash.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace hybridsim {

std::string FlowKey::to_string() const {
  return fmt::format("{}:{}->{}:{}/{}", src_ip.to_string(), src_port, dst_ip.to_string(), dst_port, ip_proto);
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

HashInput::HashInput(const FlowKey& key, HashFields fields) {
  auto put = [this](std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) buf_[size_++] = static_cast<std::uint8_t>(v >> (8 * i));
  };
  put(key.src_ip.value, 4);
  put(key.dst_ip.value, 4);
  if (fields == HashFields::FiveTuple) {
    put(key.ip_proto, 1);
    put(key.src_port, 2);
    put(key.dst_port, 2);
  }
}

std::size_t ecmp_hash(std::span<const std::uint8_t> fields, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ecmp_hash requires n >= 1");
  return static_cast<std::size_t>(fnv1a64(fields) % n);
}

}  // namespace hybridsim
