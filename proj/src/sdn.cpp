#include "hybridsim/sdn.hpp"

#include <fmt/format.h>

#include "hybridsim/errors.hpp"

namespace hybridsim {

SdnController::SdnController(Engine& engine, ConnectionManager& cm, DataPlane& dataplane)
    : engine_(engine), cm_(cm), dp_(dataplane) {
  for (NodeId sw : dp_.topology().nodes_of_kind(NodeKind::Switch)) {
    cm_.attach(sw, [this, sw](const ControlMessage& m) { on_switch_message(sw, m); });
  }
  cm_.attach(kControllerId, [this](const ControlMessage& m) { on_controller_message(m); });
}

void SdnController::send_flow_mod(NodeId sw, FlowMod mod) {
  const Topology& topo = dp_.topology();
  if (sw.value >= topo.nodes().size() || topo.node(sw).kind != NodeKind::Switch) {
    throw UnknownSwitch(fmt::format("no switch with id {}", sw.value));
  }
  SdnMessage msg;
  msg.kind = SdnMessage::Kind::FlowMod;
  msg.flow_mod = std::move(mod);
  ++flow_mods_sent_;
  cm_.send(ControlMessage{kControllerId, sw, std::move(msg)});
}

void SdnController::collect_stats(std::vector<NodeId> switches, StatsCallback done) {
  const std::uint64_t xid = next_xid_++;
  if (switches.empty()) {
    done({});
    return;
  }
  rounds_[xid] = Round{switches.size(), {}, std::move(done)};
  for (NodeId sw : switches) {
    SdnMessage msg;
    msg.kind = SdnMessage::Kind::StatsRequest;
    msg.xid = xid;
    cm_.send(ControlMessage{kControllerId, sw, std::move(msg)});
  }
}

void SdnController::on_switch_message(NodeId sw, const ControlMessage& m) {
  const auto* msg = std::get_if<SdnMessage>(&m.body);
  if (!msg) return;
  switch (msg->kind) {
    case SdnMessage::Kind::FlowMod:
      dp_.apply_flow_mod(sw, msg->flow_mod);
      ++flow_mods_applied_;
      break;
    case SdnMessage::Kind::StatsRequest: {
      SdnMessage reply;
      reply.kind = SdnMessage::Kind::StatsReply;
      reply.xid = msg->xid;
      reply.stats = dp_.collect_stats(sw);
      cm_.send(ControlMessage{sw, m.from, std::move(reply)});
      break;
    }
    case SdnMessage::Kind::StatsReply:
      break;
  }
}

void SdnController::on_controller_message(const ControlMessage& m) {
  const auto* msg = std::get_if<SdnMessage>(&m.body);
  if (!msg || msg->kind != SdnMessage::Kind::StatsReply) return;
  auto it = rounds_.find(msg->xid);
  if (it == rounds_.end()) return;
  it->second.replies.push_back(msg->stats);
  if (it->second.replies.size() < it->second.expected) return;
  Round round = std::move(it->second);
  rounds_.erase(it);
  ++rounds_completed_;
  round.done(round.replies);
}

void SdnController::install_shortest_path_ecmp(HashFields hash, std::uint16_t priority) {
  const Topology& topo = dp_.topology();
  const auto switches = topo.nodes_of_kind(NodeKind::Switch);
  for (NodeId h : topo.hosts()) {
    const auto dist = hop_distances(topo, h);
    for (NodeId sw : switches) {
      if (dist[sw.value] < 0) continue;
      PortGroup group;
      group.hash = hash;
      const auto& ports = topo.node(sw).ports;
      for (std::uint32_t p = 0; p < ports.size(); ++p) {
        NodeId next = topo.peer(sw, PortId{p}).node;
        if (dist[next.value] == dist[sw.value] - 1) group.ports.push_back(PortId{p});
      }
      FlowMod mod;
      mod.match.dst = Prefix(*topo.node(h).address, 32);
      mod.priority = priority;
      mod.action = std::move(group);
      send_flow_mod(sw, std::move(mod));
    }
  }
}

}  // namespace hybridsim
