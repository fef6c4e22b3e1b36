#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybridsim/engine.hpp"
#include "hybridsim/flow.hpp"
#include "hybridsim/forwarding.hpp"
#include "hybridsim/topology.hpp"

namespace hybridsim {

struct FlowStats {
  FlowKey key;
  double rate_bps = 0.0;
  double bytes = 0.0;
};

struct EntryStats {
  std::uint64_t entry_id = 0;
  FlowMatch match;
  std::uint16_t priority = 0;
  double rate_bps = 0.0;  // instantaneous allocated rate of flows hitting the entry
  double bytes = 0.0;     // exact integral of that rate since installation
  std::vector<FlowStats> flows;
};

struct StatsReply {
  NodeId switch_id;
  VirtualTime time;
  std::vector<EntryStats> entries;
};

struct MeasurementRecord {
  VirtualTime time;
  std::vector<double> host_arrival_bps;  // indexed like DataPlane::hosts()
  double aggregate_bps = 0.0;
  std::vector<double> channel_utilization;  // allocated / capacity per ChannelId
};

struct RoutingError {
  VirtualTime time;
  FlowKey key;
  std::string what;
};

/// Forwarding walk of one flow: nodes visited, channels crossed, and the flow
/// table entries (switch, entry id) that matched along the way.
struct ForwardingTrace {
  std::vector<NodeId> nodes;
  std::vector<ChannelId> channels;
  std::vector<std::pair<NodeId, std::uint64_t>> entries;
};

struct DataPlaneConfig {
  // Throw from rate recomputation when a flow cannot be routed, instead of
  // recording a RoutingError and holding the flow at zero rate.
  bool strict_routing = false;
};

/// Fluid-rate data plane. Owns forwarding state (FIBs for routers, flow tables for
/// switches) and the active flow set; rates are re-solved globally, once per
/// timestamp, whenever flows or forwarding change.
class DataPlane {
 public:
  DataPlane(Engine& engine, const Topology& topology, DataPlaneConfig config = {});

  const Topology& topology() const { return topo_; }

  void install_route(NodeId router, Prefix prefix, PortGroup group);
  bool remove_route(NodeId router, Prefix prefix);
  const Fib& fib(NodeId router) const;

  std::optional<std::uint64_t> apply_flow_mod(NodeId sw, const FlowMod& mod);
  const FlowTable& flow_table(NodeId sw) const;

  PortId lookup_next_hop(NodeId node, const FlowKey& key) const;
  ForwardingTrace trace_path(NodeId src_host, const FlowKey& key) const;

  /// Schedules a FlowStart at `at`. Throws DuplicateFlow if the key is active or
  /// already scheduled to start.
  void start_flow(Flow flow, VirtualTime at);
  /// Schedules a FlowStop at `at`. Throws UnknownFlow for keys neither active nor
  /// scheduled to start.
  void stop_flow(const FlowKey& key, VirtualTime at);

  const Flow* flow(const FlowKey& key) const;
  const std::map<FlowKey, Flow>& active_flows() const { return active_; }

  void request_recompute();
  /// Runs a pending recomputation immediately.
  void flush();
  std::uint64_t recompute_count() const { return recomputes_; }

  const std::vector<NodeId>& hosts() const { return hosts_; }
  MeasurementRecord sample_measurements();
  /// Samples every `interval` in [first, last] via MeasurementSample events.
  void start_sampling(Duration interval, VirtualTime first, VirtualTime last);
  const std::vector<MeasurementRecord>& series() const { return series_; }

  StatsReply collect_stats(NodeId sw);
  double flow_bytes(const FlowKey& key);

  const std::vector<RoutingError>& routing_errors() const { return routing_errors_; }
  /// Allocated load per channel from the last recomputation.
  const std::vector<double>& channel_load() const { return channel_load_; }

 private:
  struct ActiveState {
    ForwardingTrace trace;
    double bytes = 0.0;
    bool routed = true;
  };

  void activate(Flow flow);
  void deactivate(const FlowKey& key);
  void recompute();
  void integrate_to(VirtualTime now);
  void require_switch(NodeId sw) const;

  Engine& engine_;
  const Topology& topo_;
  DataPlaneConfig config_;

  std::vector<Fib> fibs_;
  std::vector<FlowTable> tables_;
  std::map<FlowKey, Flow> active_;
  std::map<FlowKey, ActiveState> state_;
  std::map<FlowKey, EventHandle> pending_starts_;
  std::map<std::pair<std::uint32_t, std::uint64_t>, double> entry_bytes_;

  EventHandle recompute_event_;
  std::uint64_t recomputes_ = 0;
  VirtualTime integrated_until_;
  std::vector<double> channel_load_;

  std::vector<NodeId> hosts_;
  std::vector<std::int64_t> host_index_;
  std::vector<MeasurementRecord> series_;
  std::vector<RoutingError> routing_errors_;
};

}  // namespace hybridsim
