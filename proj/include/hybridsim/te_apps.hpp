#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include "hybridsim/bgp.hpp"
#include "hybridsim/connection_manager.hpp"
#include "hybridsim/dataplane.hpp"
#include "hybridsim/engine.hpp"
#include "hybridsim/hedera.hpp"
#include "hybridsim/sdn.hpp"
#include "hybridsim/topology.hpp"
#include "hybridsim/traffic.hpp"

namespace hybridsim {

enum class TeApp : std::uint8_t { EcmpSrcDst, Ecmp5Tuple, Hedera };

std::string_view to_string(TeApp app);
std::optional<TeApp> parse_te_app(std::string_view name);
/// Fabric each application runs on: BGP routers for src/dst ECMP, OpenFlow-style
/// switches otherwise.
Fabric fabric_for(TeApp app);

struct TestbedConfig {
  EngineConfig engine;
  DataPlaneConfig dataplane;
  Duration control_latency = Duration::milliseconds(10);
};

/// Owns one experiment's engine, topology, data plane and connection manager, and
/// the optional control-plane subsystems. Members are wired by reference, so a
/// Testbed is neither copyable nor movable.
class Testbed {
 public:
  Testbed(Topology topology, TestbedConfig config = {}, std::shared_ptr<WallClock> wall = nullptr);
  Testbed(const Testbed&) = delete;
  Testbed& operator=(const Testbed&) = delete;

  Engine& engine() { return engine_; }
  const Topology& topology() const { return topology_; }
  DataPlane& dataplane() { return dataplane_; }
  ConnectionManager& cm() { return cm_; }

  BgpNetwork& enable_bgp(BgpConfig config);
  SdnController& enable_sdn();
  HederaScheduler& enable_hedera(HederaConfig config);

  BgpNetwork* bgp() { return bgp_.get(); }
  SdnController* sdn() { return sdn_.get(); }
  HederaScheduler* hedera() { return hedera_.get(); }

  /// FlowStart for every planned flow at pattern.start.
  void schedule_traffic(const TrafficPattern& pattern);

 private:
  Engine engine_;
  Topology topology_;
  DataPlane dataplane_;
  ConnectionManager cm_;
  std::unique_ptr<BgpNetwork> bgp_;
  std::unique_ptr<SdnController> sdn_;
  std::unique_ptr<HederaScheduler> hedera_;
};

/// Shortest-path ECMP hashed on `fields`. On a router fabric: BGP sessions on
/// every router link from t=0 with multipath. On a switch fabric: the controller
/// installs per-host entries at t=0.
void configure_ecmp(Testbed& bed, const TrafficPattern& pattern, HashFields fields, BgpConfig bgp = {});

inline void configure_ecmp_srcdst(Testbed& bed, const TrafficPattern& pattern, BgpConfig bgp = {}) {
  configure_ecmp(bed, pattern, HashFields::SrcDst, bgp);
}
inline void configure_ecmp_5tuple(Testbed& bed, const TrafficPattern& pattern, BgpConfig bgp = {}) {
  configure_ecmp(bed, pattern, HashFields::FiveTuple, bgp);
}

/// Switch fabric only: 5-tuple ECMP baseline plus Hedera polling every poll_interval up to `last_poll`.
void configure_hedera(Testbed& bed, const TrafficPattern& pattern, const HederaConfig& config, VirtualTime last_poll);

}  // namespace hybridsim
