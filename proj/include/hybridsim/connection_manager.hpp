#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>

#include "hybridsim/control_messages.hpp"
#include "hybridsim/engine.hpp"

namespace hybridsim {

/// Bridge between the emulated control plane and the engine. Every control
/// message travels through deliver(); when the delivery event executes, the CM
/// reports control activity to the engine (exactly once per message) and then
/// hands the message to the receiving endpoint.
class ConnectionManager {
 public:
  using Handler = std::function<void(const ControlMessage&)>;

  ConnectionManager(Engine& engine, Duration control_latency = Duration::milliseconds(10));

  void attach(NodeId endpoint, Handler handler);
  bool attached(NodeId endpoint) const { return handlers_.count(endpoint) != 0; }

  /// Enqueues `msg` as a ControlMessageDelivery at `at + control_latency`.
  void deliver(ControlMessage msg, VirtualTime at);
  void send(ControlMessage msg) { deliver(std::move(msg), engine_.now()); }

  Duration control_latency() const { return latency_; }
  std::uint64_t sent() const { return sent_; }
  std::uint64_t delivered() const { return delivered_; }
  std::uint64_t notifications() const { return notifications_; }
  std::uint64_t dropped() const { return dropped_; }
  VirtualTime last_delivery() const { return last_delivery_; }

 private:
  Engine& engine_;
  Duration latency_;
  std::unordered_map<NodeId, Handler> handlers_;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t notifications_ = 0;
  std::uint64_t dropped_ = 0;
  VirtualTime last_delivery_;
};

}  // namespace hybridsim
