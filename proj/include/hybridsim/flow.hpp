#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "hybridsim/address.hpp"
#include "hybridsim/topology.hpp"
#include "hybridsim/virtual_time.hpp"

namespace hybridsim {

inline constexpr std::uint8_t kProtoUdp = 17;

/// Transport 5-tuple; unique per flow within an experiment.
struct FlowKey {
  Ipv4 src_ip;
  Ipv4 dst_ip;
  std::uint8_t ip_proto = kProtoUdp;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;

  auto operator<=>(const FlowKey&) const = default;
  std::string to_string() const;
};

/// Constant-demand fluid flow. `allocated` and `path` are owned by the data plane
/// and refreshed on every rate recomputation.
struct Flow {
  FlowKey key;
  NodeId src_host;
  NodeId dst_host;
  double demand_bps = 0.0;
  double allocated_bps = 0.0;
  std::vector<ChannelId> path;
  VirtualTime start;
  VirtualTime stop = VirtualTime::max();
};

}  // namespace hybridsim
