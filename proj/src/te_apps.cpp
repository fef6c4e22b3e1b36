#include "hybridsim/te_apps.hpp"

#include <stdexcept>

namespace hybridsim {

std::string_view to_string(TeApp app) {
  switch (app) {
    case TeApp::EcmpSrcDst: return "ecmp-srcdst";
    case TeApp::Ecmp5Tuple: return "ecmp-5tuple";
    case TeApp::Hedera: return "hedera";
  }
  return "?";
}

std::optional<TeApp> parse_te_app(std::string_view name) {
  for (TeApp app : {TeApp::EcmpSrcDst, TeApp::Ecmp5Tuple, TeApp::Hedera})
    if (to_string(app) == name) return app;
  return std::nullopt;
}

Fabric fabric_for(TeApp app) { return app == TeApp::EcmpSrcDst ? Fabric::RouterFabric : Fabric::SwitchFabric; }

Testbed::Testbed(Topology topology, TestbedConfig config, std::shared_ptr<WallClock> wall)
    : engine_(config.engine, std::move(wall)),
      topology_(std::move(topology)),
      dataplane_(engine_, topology_, config.dataplane),
      cm_(engine_, config.control_latency) {}

BgpNetwork& Testbed::enable_bgp(BgpConfig config) {
  if (!bgp_) bgp_ = std::make_unique<BgpNetwork>(engine_, cm_, dataplane_, config);
  return *bgp_;
}

SdnController& Testbed::enable_sdn() {
  if (!sdn_) sdn_ = std::make_unique<SdnController>(engine_, cm_, dataplane_);
  return *sdn_;
}

HederaScheduler& Testbed::enable_hedera(HederaConfig config) {
  if (!hedera_) hedera_ = std::make_unique<HederaScheduler>(engine_, enable_sdn(), dataplane_, config);
  return *hedera_;
}

void Testbed::schedule_traffic(const TrafficPattern& pattern) {
  for (const auto& planned : pattern.flows) {
    Flow f;
    f.key = planned.key;
    f.src_host = planned.src;
    f.dst_host = planned.dst;
    f.demand_bps = planned.demand_bps;
    dataplane_.start_flow(std::move(f), pattern.start);
  }
}

void configure_ecmp(Testbed& bed, const TrafficPattern& pattern, HashFields fields, BgpConfig bgp) {
  if (!bed.topology().nodes_of_kind(NodeKind::Router).empty()) {
    bgp.multipath = true;
    bgp.ecmp_hash = fields;
    BgpNetwork& net = bed.enable_bgp(bgp);
    net.install_connected_routes();
    net.open_all_sessions(VirtualTime::zero());
  } else {
    bed.enable_sdn().install_shortest_path_ecmp(fields, kBaselinePriority);
  }
  bed.schedule_traffic(pattern);
}

void configure_hedera(Testbed& bed, const TrafficPattern& pattern, const HederaConfig& config, VirtualTime last_poll) {
  if (!bed.topology().nodes_of_kind(NodeKind::Router).empty())
    throw std::invalid_argument("hedera needs a switch fabric");
  configure_ecmp_5tuple(bed, pattern);
  bed.enable_hedera(config).start(VirtualTime::zero() + config.poll_interval, last_poll);
}

}  // namespace hybridsim
