#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <map>
#include <vector>

#include "hybridsim/dataplane.hpp"
#include "hybridsim/engine.hpp"
#include "hybridsim/sdn.hpp"
#include "hybridsim/topology.hpp"

namespace hybridsim {

struct HederaConfig {
  Duration poll_interval = Duration::seconds(5);
  // Fraction of the sender's host-link capacity above which a flow is an elephant.
  double elephant_threshold = 0.1;
  // Place elephants by estimated natural demand; when false, by measured rate.
  bool use_demand_estimation = true;

  bool operator==(const HederaConfig&) const = default;
};

/// Priority of the exact-match entries that pin elephants; above the baseline.
inline constexpr std::uint16_t kPinPriority = 100;
inline constexpr std::uint16_t kBaselinePriority = 10;

struct DemandFlow {
  NodeId src;
  NodeId dst;
  // Known upper bound on the flow's rate; the estimator alone assumes none.
  double cap_bps = std::numeric_limits<double>::infinity();
};

/// Natural-demand estimation for a set of host-to-host flows: alternate
/// sender-side fair sharing and receiver-side limiting until a fixed point.
/// `nic_bps(host)` gives each host's link capacity. Result indexed like `flows`.
std::vector<double> demand_estimate(std::span<const DemandFlow> flows,
                                    const std::function<double(NodeId)>& nic_bps);

/// Periodic elephant detection and Global First Fit placement on top of
/// 5-tuple ECMP. Every poll sends StatsRequests to the host-facing switches;
/// when all replies are in, elephants are placed on the first minimum-hop path
/// with enough residual capacity and pinned with exact-match FlowMods.
class HederaScheduler {
 public:
  HederaScheduler(Engine& engine, SdnController& controller, DataPlane& dataplane, HederaConfig config = {});

  /// StatsPoll events at first, first + poll_interval, ... while <= last.
  void start(VirtualTime first, VirtualTime last);

  /// One scheduling pass over a complete set of stats replies.
  void schedule_from_stats(const std::vector<StatsReply>& replies);

  std::uint64_t polls() const { return polls_; }
  std::uint64_t reroutes() const { return reroutes_; }
  const std::vector<VirtualTime>& poll_times() const { return poll_times_; }
  const std::map<FlowKey, Path>& pinned() const { return pinned_; }

 private:
  void poll();
  void pin(const FlowKey& key, const Path& path);

  Engine& engine_;
  SdnController& controller_;
  DataPlane& dp_;
  HederaConfig config_;
  std::vector<NodeId> edge_switches_;
  std::map<FlowKey, Path> pinned_;
  std::vector<VirtualTime> poll_times_;
  std::uint64_t polls_ = 0;
  std::uint64_t reroutes_ = 0;
};

}  // namespace hybridsim
