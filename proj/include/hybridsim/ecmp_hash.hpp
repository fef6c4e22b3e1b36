#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "hybridsim/flow.hpp"

namespace hybridsim {

enum class HashFields : std::uint8_t {
  SrcDst,     // (src_ip, dst_ip)
  FiveTuple,  // (src_ip, dst_ip, ip_proto, src_port, dst_port)
};

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

/// Big-endian concatenation of the selected header fields.
class HashInput {
 public:
  HashInput(const FlowKey& key, HashFields fields);
  std::span<const std::uint8_t> bytes() const { return {buf_.data(), size_}; }

 private:
  std::array<std::uint8_t, 13> buf_{};
  std::size_t size_ = 0;
};

/// FNV-1a 64 of `fields`, reduced modulo `n`. Requires n >= 1.
std::size_t ecmp_hash(std::span<const std::uint8_t> fields, std::size_t n);

inline std::size_t ecmp_hash(const FlowKey& key, HashFields fields, std::size_t n) {
  return ecmp_hash(HashInput(key, fields).bytes(), n);
}

}  // namespace hybridsim
