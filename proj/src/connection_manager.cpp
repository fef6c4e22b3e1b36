#include "hybridsim/connection_manager.hpp"

#include <stdexcept>

namespace hybridsim {

std::string_view kind_name(const ControlMessage& msg) {
  if (const auto* bgp = std::get_if<BgpMessage>(&msg.body)) {
    switch (bgp->kind) {
      case BgpMessage::Kind::Open: return "bgp-open";
      case BgpMessage::Kind::Keepalive: return "bgp-keepalive";
      case BgpMessage::Kind::Update: return "bgp-update";
      case BgpMessage::Kind::Notification: return "bgp-notification";
    }
  }
  switch (std::get<SdnMessage>(msg.body).kind) {
    case SdnMessage::Kind::FlowMod: return "of-flow-mod";
    case SdnMessage::Kind::StatsRequest: return "of-stats-request";
    case SdnMessage::Kind::StatsReply: return "of-stats-reply";
  }
  return "?";
}

ConnectionManager::ConnectionManager(Engine& engine, Duration control_latency)
    : engine_(engine), latency_(control_latency) {
  if (control_latency < Duration()) throw std::invalid_argument("control latency must be non-negative");
}

void ConnectionManager::attach(NodeId endpoint, Handler handler) { handlers_[endpoint] = std::move(handler); }

void ConnectionManager::deliver(ControlMessage msg, VirtualTime at) {
  ++sent_;
  engine_.schedule(at + latency_, EventKind::ControlMessageDelivery, [this, m = std::move(msg)] {
    ++delivered_;
    last_delivery_ = engine_.now();
    engine_.notify_control_activity(engine_.now());
    ++notifications_;
    auto it = handlers_.find(m.to);
    if (it == handlers_.end()) {
      ++dropped_;
      return;
    }
    it->second(m);
  });
}

}  // namespace hybridsim
