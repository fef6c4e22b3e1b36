#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "hybridsim/connection_manager.hpp"
#include "hybridsim/dataplane.hpp"
#include "hybridsim/engine.hpp"

namespace hybridsim {

/// In-process OpenFlow-style controller plus the switch agents that execute its
/// messages. FlowMods and stats request/reply pairs all travel through the
/// connection manager, so every exchange counts as control activity.
class SdnController {
 public:
  using StatsCallback = std::function<void(const std::vector<StatsReply>&)>;

  SdnController(Engine& engine, ConnectionManager& cm, DataPlane& dataplane);

  /// Throws UnknownSwitch immediately if `sw` is not a switch.
  void send_flow_mod(NodeId sw, FlowMod mod);

  /// Sends a StatsRequest to each switch; `done` runs once every reply arrived.
  void collect_stats(std::vector<NodeId> switches, StatsCallback done);

  /// Baseline shortest-path forwarding: on every switch, one entry per host
  /// destination (dst /32) whose action is an ECMP group over all ports that lie
  /// on a minimum-hop path to that host.
  void install_shortest_path_ecmp(HashFields hash, std::uint16_t priority);

  std::uint64_t flow_mods_sent() const { return flow_mods_sent_; }
  std::uint64_t flow_mods_applied() const { return flow_mods_applied_; }
  std::uint64_t stats_rounds_completed() const { return rounds_completed_; }

 private:
  struct Round {
    std::size_t expected = 0;
    std::vector<StatsReply> replies;
    StatsCallback done;
  };

  void on_switch_message(NodeId sw, const ControlMessage& m);
  void on_controller_message(const ControlMessage& m);

  Engine& engine_;
  ConnectionManager& cm_;
  DataPlane& dp_;
  std::map<std::uint64_t, Round> rounds_;
  std::uint64_t next_xid_ = 1;
  std::uint64_t flow_mods_sent_ = 0;
  std::uint64_t flow_mods_applied_ = 0;
  std::uint64_t rounds_completed_ = 0;
};

}  // namespace hybridsim
