#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <variant>
#include <vector>

#include "hybridsim/address.hpp"
#include "hybridsim/dataplane.hpp"
#include "hybridsim/forwarding.hpp"
#include "hybridsim/topology.hpp"

namespace hybridsim {

/// Control-plane endpoints are topology nodes, plus the single in-process SDN
/// controller which has no data-plane presence.
inline constexpr NodeId kControllerId{std::numeric_limits<std::uint32_t>::max()};

struct BgpAnnouncement {
  Prefix prefix;
  std::vector<std::uint32_t> as_path;  // nearest AS first
  NodeId next_hop;
  bool operator==(const BgpAnnouncement&) const = default;
};

struct BgpMessage {
  enum class Kind : std::uint8_t { Open, Keepalive, Update, Notification };
  Kind kind = Kind::Keepalive;  // default-constructed message is a Keepalive
  std::uint32_t asn = 0;  // Open
  std::vector<BgpAnnouncement> announced;
  std::vector<Prefix> withdrawn;
};

struct SdnMessage {
  enum class Kind : std::uint8_t { FlowMod, StatsRequest, StatsReply };
  Kind kind = Kind::FlowMod;
  std::uint64_t xid = 0;
  FlowMod flow_mod;
  StatsReply stats;
};

struct ControlMessage {
  NodeId from;
  NodeId to;
  std::variant<BgpMessage, SdnMessage> body;
};

std::string_view kind_name(const ControlMessage& msg);

}  // namespace hybridsim
