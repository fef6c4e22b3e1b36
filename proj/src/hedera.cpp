#include "hybridsim/hedera.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridsim {

std::vector<double> demand_estimate(std::span<const DemandFlow> flows,
                                    const std::function<double(NodeId)>& nic_bps) {
  const std::size_t n = flows.size();
  std::vector<double> est(n, 0.0);
  std::vector<bool> converged(n, false);
  std::map<NodeId, std::vector<std::size_t>> by_src, by_dst;
  for (std::size_t i = 0; i < n; ++i) {
    by_src[flows[i].src].push_back(i);
    by_dst[flows[i].dst].push_back(i);
  }

  for (int iteration = 0; iteration < 1000; ++iteration) {
    double moved = 0.0;
    auto set = [&](std::size_t i, double v) {
      moved = std::max(moved, std::abs(v - est[i]));
      est[i] = v;
    };

    // Senders split their spare capacity equally among unconverged flows,
    // water-filling around flows that hit their own cap.
    for (const auto& [src, idx] : by_src) {
      double spare = nic_bps(src);
      std::vector<std::size_t> open;
      for (std::size_t i : idx) {
        if (converged[i]) spare -= est[i];
        else open.push_back(i);
      }
      std::sort(open.begin(), open.end(), [&](std::size_t a, std::size_t b) { return flows[a].cap_bps < flows[b].cap_bps; });
      spare = std::max(spare, 0.0);
      for (std::size_t j = 0; j < open.size(); ++j) {
        const std::size_t i = open[j];
        const double share = spare / static_cast<double>(open.size() - j);
        const double v = std::min(flows[i].cap_bps, share);
        set(i, v);
        spare -= v;
        if (v == flows[i].cap_bps) converged[i] = true;
      }
    }

    // Oversubscribed receivers cap their receiver-limited flows at an equal share.
    for (const auto& [dst, idx] : by_dst) {
      const double nic = nic_bps(dst);
      double total = 0.0;
      for (std::size_t i : idx) total += est[i];
      if (total <= nic * (1.0 + 1e-12)) continue;

      std::vector<std::size_t> limited = idx;
      double sender_limited = 0.0;
      double share = nic / static_cast<double>(limited.size());
      bool changed = true;
      while (changed && !limited.empty()) {
        changed = false;
        for (auto it = limited.begin(); it != limited.end();) {
          if (est[*it] < share) {
            sender_limited += est[*it];
            it = limited.erase(it);
            changed = true;
          } else {
            ++it;
          }
        }
        if (!limited.empty()) share = (nic - sender_limited) / static_cast<double>(limited.size());
      }
      for (std::size_t i : limited) {
        set(i, share);
        converged[i] = true;
      }
    }

    if (moved <= 1e-9) break;
  }
  return est;
}

// ---------------------------------------------------------------------------

HederaScheduler::HederaScheduler(Engine& engine, SdnController& controller, DataPlane& dataplane, HederaConfig config)
    : engine_(engine), controller_(controller), dp_(dataplane), config_(config) {
  if (config_.poll_interval <= Duration()) throw std::invalid_argument("poll_interval must be positive");
  if (!(config_.elephant_threshold > 0.0 && config_.elephant_threshold <= 1.0)) {
    throw std::invalid_argument("elephant_threshold must be in (0, 1]");
  }
  const Topology& topo = dp_.topology();
  for (NodeId sw : topo.nodes_of_kind(NodeKind::Switch)) {
    const auto& ports = topo.node(sw).ports;
    for (std::uint32_t p = 0; p < ports.size(); ++p) {
      if (topo.node(topo.peer(sw, PortId{p}).node).kind == NodeKind::Host) {
        edge_switches_.push_back(sw);
        break;
      }
    }
  }
}

void HederaScheduler::start(VirtualTime first, VirtualTime last) {
  for (VirtualTime t = first; t <= last; t = t + config_.poll_interval) {
    engine_.schedule(t, EventKind::StatsPoll, [this] { poll(); });
  }
}

void HederaScheduler::poll() {
  ++polls_;
  poll_times_.push_back(engine_.now());
  controller_.collect_stats(edge_switches_, [this](const std::vector<StatsReply>& replies) { schedule_from_stats(replies); });
}

void HederaScheduler::schedule_from_stats(const std::vector<StatsReply>& replies) {
  const Topology& topo = dp_.topology();
  auto nic = [&](NodeId host) { return topo.link(topo.node(host).ports.at(0)).capacity_bps; };

  struct Observed {
    NodeId src, dst;
    double measured = 0.0;
  };
  std::map<FlowKey, Observed> observed;
  for (const auto& reply : replies) {
    for (const auto& entry : reply.entries) {
      for (const auto& fs : entry.flows) {
        auto src = topo.host_with_address(fs.key.src_ip);
        auto dst = topo.host_with_address(fs.key.dst_ip);
        if (!src || !dst) continue;
        observed[fs.key] = Observed{*src, *dst, fs.rate_bps};
      }
    }
  }
  if (observed.empty()) return;

  std::vector<FlowKey> keys;
  std::vector<DemandFlow> demand_input;
  for (const auto& [key, o] : observed) {
    keys.push_back(key);
    demand_input.push_back({o.src, o.dst});
  }
  std::vector<double> demand = demand_estimate(demand_input, nic);
  if (!config_.use_demand_estimation) {
    for (std::size_t i = 0; i < keys.size(); ++i) demand[i] = observed.at(keys[i]).measured;
  }

  std::vector<double> reserved(topo.channel_count(), 0.0);
  auto fits = [&](const std::vector<ChannelId>& channels, double d) {
    return std::all_of(channels.begin(), channels.end(), [&](ChannelId c) {
      return reserved[c.value] + d <= topo.channel_capacity(c) * (1.0 + 1e-9);
    });
  };
  auto reserve = [&](const std::vector<ChannelId>& channels, double d) {
    for (ChannelId c : channels) reserved[c.value] += d;
  };

  for (std::size_t i = 0; i < keys.size(); ++i) {
    const FlowKey& key = keys[i];
    const Observed& o = observed.at(key);
    const double threshold = config_.elephant_threshold * nic(o.src);
    if (o.measured < threshold && demand[i] < threshold) continue;

    const Flow* live = dp_.flow(key);
    std::vector<ChannelId> current = live ? live->path : std::vector<ChannelId>{};
    if (!current.empty() && fits(current, demand[i])) {
      reserve(current, demand[i]);
      continue;
    }
    const auto candidates = shortest_paths_up_down(topo, o.src, o.dst);
    auto chosen = std::find_if(candidates.begin(), candidates.end(),
                               [&](const Path& p) { return fits(p.channels, demand[i]); });
    if (chosen == candidates.end()) {
      reserve(current, demand[i]);
      continue;
    }
    reserve(chosen->channels, demand[i]);
    if (chosen->channels != current) pin(key, *chosen);
  }
}

void HederaScheduler::pin(const FlowKey& key, const Path& path) {
  const Topology& topo = dp_.topology();
  std::vector<NodeId> interior(path.nodes.begin() + 1, path.nodes.end() - 1);

  if (auto old = pinned_.find(key); old != pinned_.end()) {
    for (std::size_t i = 1; i + 1 < old->second.nodes.size(); ++i) {
      NodeId sw = old->second.nodes[i];
      if (std::find(interior.begin(), interior.end(), sw) != interior.end()) continue;
      FlowMod del;
      del.command = FlowModCommand::Delete;
      del.match = FlowMatch::exact(key);
      del.priority = kPinPriority;
      controller_.send_flow_mod(sw, std::move(del));
    }
  }

  for (std::size_t i = 1; i + 1 < path.nodes.size(); ++i) {
    NodeId sw = path.nodes[i];
    const auto& ports = topo.node(sw).ports;
    for (std::uint32_t p = 0; p < ports.size(); ++p) {
      if (topo.egress_channel(sw, PortId{p}) != path.channels[i]) continue;
      FlowMod mod;
      mod.match = FlowMatch::exact(key);
      mod.priority = kPinPriority;
      mod.action = PortGroup{{PortId{p}}, HashFields::FiveTuple};
      controller_.send_flow_mod(sw, std::move(mod));
      break;
    }
  }
  pinned_[key] = path;
  ++reroutes_;
}

}  // namespace hybridsim
