#include "hybridsim/dataplane.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "hybridsim/errors.hpp"
#include "hybridsim/max_min.hpp"

namespace hybridsim {

DataPlane::DataPlane(Engine& engine, const Topology& topology, DataPlaneConfig config)
    : engine_(engine),
      topo_(topology),
      config_(config),
      fibs_(topology.nodes().size()),
      tables_(topology.nodes().size()),
      channel_load_(topology.channel_count(), 0.0),
      hosts_(topology.hosts()),
      host_index_(topology.nodes().size(), -1) {
  for (std::size_t i = 0; i < hosts_.size(); ++i) host_index_[hosts_[i].value] = static_cast<std::int64_t>(i);
}

// --- forwarding state -------------------------------------------------------

void DataPlane::install_route(NodeId router, Prefix prefix, PortGroup group) {
  if (router.value >= topo_.nodes().size() || topo_.node(router).kind != NodeKind::Router) {
    throw UnknownPort(fmt::format("node {} is not a router", router.value));
  }
  if (group.ports.empty()) throw UnknownPort("route needs at least one port");
  for (PortId p : group.ports) {
    if (!topo_.has_port(router, p)) {
      throw UnknownPort(fmt::format("router {} has no port {}", topo_.node(router).name, p.value));
    }
  }
  fibs_[router.value].upsert(prefix, std::move(group));
  request_recompute();
}

bool DataPlane::remove_route(NodeId router, Prefix prefix) {
  bool removed = fibs_.at(router.value).remove(prefix);
  if (removed) request_recompute();
  return removed;
}

const Fib& DataPlane::fib(NodeId router) const { return fibs_.at(router.value); }

void DataPlane::require_switch(NodeId sw) const {
  if (sw.value >= topo_.nodes().size() || topo_.node(sw).kind != NodeKind::Switch) {
    throw UnknownSwitch(fmt::format("node {} is not a switch", sw.value));
  }
}

std::optional<std::uint64_t> DataPlane::apply_flow_mod(NodeId sw, const FlowMod& mod) {
  require_switch(sw);
  if (mod.command == FlowModCommand::Add) {
    if (mod.action.ports.empty()) throw UnknownPort("flow entry needs at least one output port");
    for (PortId p : mod.action.ports) {
      if (!topo_.has_port(sw, p)) throw UnknownPort(fmt::format("switch {} has no port {}", topo_.node(sw).name, p.value));
    }
  }
  auto id = tables_[sw.value].apply(mod);
  if (id) request_recompute();
  return id;
}

const FlowTable& DataPlane::flow_table(NodeId sw) const { return tables_.at(sw.value); }

PortId DataPlane::lookup_next_hop(NodeId node, const FlowKey& key) const {
  const Node& n = topo_.node(node);
  switch (n.kind) {
    case NodeKind::Host:
      if (n.ports.empty()) throw NoRoute(fmt::format("host {} is not connected", n.name));
      return PortId{0};
    case NodeKind::Router: {
      auto route = fibs_[node.value].longest_match(key.dst_ip);
      if (!route) throw NoRoute(fmt::format("{} has no route to {}", n.name, key.dst_ip.to_string()));
      return route->second.select(key);
    }
    case NodeKind::Switch: {
      const FlowEntry* e = tables_[node.value].lookup(key);
      if (!e) throw NoRoute(fmt::format("{} has no entry matching {}", n.name, key.to_string()));
      return e->action.select(key);
    }
  }
  throw NoRoute("unknown node kind");
}

ForwardingTrace DataPlane::trace_path(NodeId src_host, const FlowKey& key) const {
  ForwardingTrace t;
  std::vector<bool> visited(topo_.nodes().size(), false);
  NodeId at = src_host;
  t.nodes.push_back(at);
  while (true) {
    visited[at.value] = true;
    PortId port;
    if (topo_.node(at).kind == NodeKind::Switch) {
      const FlowEntry* e = tables_[at.value].lookup(key);
      if (!e) throw NoRoute(fmt::format("{} has no entry matching {}", topo_.node(at).name, key.to_string()));
      t.entries.emplace_back(at, e->id);
      port = e->action.select(key);
    } else {
      port = lookup_next_hop(at, key);
    }
    t.channels.push_back(topo_.egress_channel(at, port));
    NodeId next = topo_.peer(at, port).node;
    t.nodes.push_back(next);
    const Node& nn = topo_.node(next);
    if (nn.kind == NodeKind::Host) {
      if (nn.address == key.dst_ip) return t;
      throw NoRoute(fmt::format("{} delivered to {} instead of {}", key.to_string(), nn.name, key.dst_ip.to_string()));
    }
    if (visited[next.value]) {
      throw RoutingLoop(fmt::format("{} revisits {}", key.to_string(), nn.name));
    }
    at = next;
  }
}

// --- flow lifecycle -----------------------------------------------------------

void DataPlane::start_flow(Flow flow, VirtualTime at) {
  if (active_.count(flow.key) || pending_starts_.count(flow.key)) {
    throw DuplicateFlow(fmt::format("flow {} already exists", flow.key.to_string()));
  }
  if (topo_.node(flow.src_host).kind != NodeKind::Host || topo_.node(flow.dst_host).kind != NodeKind::Host) {
    throw InvalidPath(fmt::format("flow {} endpoints must be hosts", flow.key.to_string()));
  }
  flow.start = at;
  FlowKey key = flow.key;
  pending_starts_[key] = engine_.schedule(at, EventKind::FlowStart, [this, f = std::move(flow)]() mutable {
    pending_starts_.erase(f.key);
    activate(std::move(f));
  });
}

void DataPlane::stop_flow(const FlowKey& key, VirtualTime at) {
  if (!active_.count(key) && !pending_starts_.count(key)) {
    throw UnknownFlow(fmt::format("flow {} is not active", key.to_string()));
  }
  engine_.schedule(at, EventKind::FlowStop, [this, key] {
    if (active_.count(key)) deactivate(key);
  });
}

const Flow* DataPlane::flow(const FlowKey& key) const {
  auto it = active_.find(key);
  return it == active_.end() ? nullptr : &it->second;
}

void DataPlane::activate(Flow flow) {
  integrate_to(engine_.now());
  flow.allocated_bps = 0.0;
  flow.path.clear();
  FlowKey key = flow.key;
  active_.emplace(key, std::move(flow));
  state_.emplace(key, ActiveState{});
  request_recompute();
}

void DataPlane::deactivate(const FlowKey& key) {
  integrate_to(engine_.now());
  active_.erase(key);
  state_.erase(key);
  request_recompute();
}

// --- rates --------------------------------------------------------------------

void DataPlane::request_recompute() {
  if (engine_.pending(recompute_event_)) return;
  recompute_event_ = engine_.schedule(engine_.now(), EventKind::RateRecompute, [this] {
    recompute_event_ = EventHandle();
    recompute();
  });
}

void DataPlane::flush() {
  if (engine_.cancel(recompute_event_)) {
    recompute_event_ = EventHandle();
    recompute();
  }
}

void DataPlane::integrate_to(VirtualTime now) {
  if (now <= integrated_until_) return;
  const double dt = (now - integrated_until_).to_seconds();
  for (auto& [key, f] : active_) {
    const double bytes = f.allocated_bps * dt / 8.0;
    if (bytes == 0.0) continue;
    auto& st = state_.at(key);
    st.bytes += bytes;
    for (const auto& [sw, entry] : st.trace.entries) entry_bytes_[{sw.value, entry}] += bytes;
  }
  integrated_until_ = now;
}

void DataPlane::recompute() {
  integrate_to(engine_.now());
  ++recomputes_;

  std::vector<FlowDemand> demands;
  demands.reserve(active_.size());
  for (auto& [key, f] : active_) {
    auto& st = state_.at(key);
    FlowDemand d;
    try {
      st.trace = trace_path(f.src_host, key);
      f.path = st.trace.channels;
      st.routed = true;
      d.demand = f.demand_bps;
      for (ChannelId c : f.path) d.resources.push_back(c.value);
    } catch (const SimError& e) {
      if (config_.strict_routing) throw;
      // One diagnostic per transition into the unrouted state.
      if (st.routed) routing_errors_.push_back({engine_.now(), key, e.what()});
      st.routed = false;
      st.trace = ForwardingTrace{};
      f.path.clear();
      d.demand = 0.0;
    }
    demands.push_back(std::move(d));
  }

  std::vector<double> capacities(topo_.channel_count());
  for (std::size_t c = 0; c < capacities.size(); ++c) capacities[c] = topo_.channel_capacity(ChannelId{static_cast<std::uint32_t>(c)});
  const auto rates = compute_rates(demands, capacities);

  std::fill(channel_load_.begin(), channel_load_.end(), 0.0);
  std::size_t i = 0;
  for (auto& [key, f] : active_) {
    f.allocated_bps = rates[i++];
    for (ChannelId c : f.path) channel_load_[c.value] += f.allocated_bps;
  }
}

// --- measurement --------------------------------------------------------------

MeasurementRecord DataPlane::sample_measurements() {
  flush();
  MeasurementRecord rec;
  rec.time = engine_.now();
  rec.host_arrival_bps.assign(hosts_.size(), 0.0);
  for (const auto& [key, f] : active_) {
    rec.host_arrival_bps[static_cast<std::size_t>(host_index_[f.dst_host.value])] += f.allocated_bps;
    rec.aggregate_bps += f.allocated_bps;
  }
  rec.channel_utilization.resize(channel_load_.size());
  for (std::size_t c = 0; c < channel_load_.size(); ++c) {
    rec.channel_utilization[c] = channel_load_[c] / topo_.channel_capacity(ChannelId{static_cast<std::uint32_t>(c)});
  }
  series_.push_back(rec);
  return rec;
}

void DataPlane::start_sampling(Duration interval, VirtualTime first, VirtualTime last) {
  if (interval <= Duration()) throw std::invalid_argument("sample interval must be positive");
  struct Sampler {
    DataPlane* dp;
    Duration interval;
    VirtualTime first;
    VirtualTime last;
    std::int64_t n;
    void operator()() const {
      dp->sample_measurements();
      VirtualTime next = first + interval * (n + 1);
      if (next <= last) dp->engine_.schedule(next, EventKind::MeasurementSample, Sampler{dp, interval, first, last, n + 1});
    }
  };
  if (first <= last) engine_.schedule(first, EventKind::MeasurementSample, Sampler{this, interval, first, last, 0});
}

StatsReply DataPlane::collect_stats(NodeId sw) {
  require_switch(sw);
  flush();
  integrate_to(engine_.now());
  StatsReply reply;
  reply.switch_id = sw;
  reply.time = engine_.now();
  for (const FlowEntry& e : tables_[sw.value].entries()) {
    EntryStats es;
    es.entry_id = e.id;
    es.match = e.match;
    es.priority = e.priority;
    auto it = entry_bytes_.find({sw.value, e.id});
    es.bytes = it == entry_bytes_.end() ? 0.0 : it->second;
    for (const auto& [key, st] : state_) {
      bool hits = std::any_of(st.trace.entries.begin(), st.trace.entries.end(),
                              [&](const auto& hit) { return hit.first == sw && hit.second == e.id; });
      if (!hits) continue;
      const double rate = active_.at(key).allocated_bps;
      es.rate_bps += rate;
      es.flows.push_back({key, rate, st.bytes});
    }
    reply.entries.push_back(std::move(es));
  }
  return reply;
}

double DataPlane::flow_bytes(const FlowKey& key) {
  flush();
  integrate_to(engine_.now());
  auto it = state_.find(key);
  if (it == state_.end()) throw UnknownFlow(fmt::format("flow {} is not active", key.to_string()));
  return it->second.bytes;
}

}  // namespace hybridsim
