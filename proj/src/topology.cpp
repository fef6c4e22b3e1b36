#include "hybridsim/topology.hpp"

#include <deque>
#include <stdexcept>

#include <fmt/format.h>

#include "hybridsim/errors.hpp"

namespace hybridsim {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Host: return "host";
    case NodeKind::Switch: return "switch";
    case NodeKind::Router: return "router";
  }
  return "?";
}

std::string_view to_string(Fabric fabric) { return fabric == Fabric::SwitchFabric ? "switch" : "router"; }

NodeId Topology::add_node(Node node) {
  if (by_name_.count(node.name)) throw InvalidTopology(fmt::format("duplicate node name '{}'", node.name));
  node.id = NodeId{static_cast<std::uint32_t>(nodes_.size())};
  by_name_.emplace(node.name, node.id);
  nodes_.push_back(std::move(node));
  return nodes_.back().id;
}

NodeId Topology::add_host(std::string name, Ipv4 address) {
  if (by_address_.count(address.value)) {
    throw InvalidTopology(fmt::format("duplicate host address {}", address.to_string()));
  }
  Node n;
  n.kind = NodeKind::Host;
  n.name = std::move(name);
  n.address = address;
  NodeId id = add_node(std::move(n));
  by_address_.emplace(address.value, id);
  return id;
}

NodeId Topology::add_switch(std::string name) {
  Node n;
  n.kind = NodeKind::Switch;
  n.name = std::move(name);
  return add_node(std::move(n));
}

NodeId Topology::add_router(std::string name, std::uint32_t asn) {
  Node n;
  n.kind = NodeKind::Router;
  n.name = std::move(name);
  n.asn = asn;
  return add_node(std::move(n));
}

LinkId Topology::connect(NodeId a, NodeId b, double capacity_bps, Duration latency) {
  if (a.value >= nodes_.size() || b.value >= nodes_.size()) throw InvalidTopology("link references unknown node");
  if (a == b) throw InvalidTopology(fmt::format("self-loop on '{}'", node(a).name));
  if (!(capacity_bps > 0.0)) throw InvalidTopology("link capacity must be positive");
  LinkId id{static_cast<std::uint32_t>(links_.size())};
  Link l;
  l.id = id;
  l.a = {a, PortId{static_cast<std::uint32_t>(nodes_[a.value].ports.size())}};
  l.b = {b, PortId{static_cast<std::uint32_t>(nodes_[b.value].ports.size())}};
  l.capacity_bps = capacity_bps;
  l.latency = latency;
  nodes_[a.value].ports.push_back(id);
  nodes_[b.value].ports.push_back(id);
  links_.push_back(l);
  return id;
}

std::vector<NodeId> Topology::hosts() const { return nodes_of_kind(NodeKind::Host); }

std::vector<NodeId> Topology::nodes_of_kind(NodeKind kind) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_)
    if (n.kind == kind) out.push_back(n.id);
  return out;
}

std::optional<NodeId> Topology::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> Topology::host_with_address(Ipv4 address) const {
  auto it = by_address_.find(address.value);
  if (it == by_address_.end()) return std::nullopt;
  return it->second;
}

ChannelId Topology::egress_channel(NodeId n, PortId port) const {
  const Link& l = link(node(n).ports.at(port.value));
  bool forward = l.a.node == n && l.a.port == port;
  return ChannelId{l.id.value * 2 + (forward ? 0u : 1u)};
}

Endpoint Topology::peer(NodeId n, PortId port) const {
  const Link& l = link(node(n).ports.at(port.value));
  return (l.a.node == n && l.a.port == port) ? l.b : l.a;
}

std::optional<PortId> Topology::port_toward(NodeId from, NodeId to) const {
  const auto& ports = node(from).ports;
  for (std::uint32_t p = 0; p < ports.size(); ++p) {
    if (peer(from, PortId{p}).node == to) return PortId{p};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::uint32_t fat_tree_asn(Layer layer, int pod, int index) {
  // 4-byte private range; layer in the hundred-thousands, pod in the thousands.
  return 4'200'000'000u + static_cast<std::uint32_t>(layer) * 100'000u + static_cast<std::uint32_t>(pod + 1) * 1'000u +
         static_cast<std::uint32_t>(index);
}

Topology build_fat_tree(const FatTreeParams& params, Fabric fabric) {
  const int k = params.k;
  if (k < 2 || k % 2 != 0) throw InvalidK(fmt::format("k must be even and >= 2, got {}", k));
  if (k > 254) throw InvalidK(fmt::format("k={} does not fit the 10.pod.switch.host address plan", k));
  const int half = k / 2;
  const double cap = params.link_capacity_bps;

  Topology topo;
  topo.fat_tree_k = k;
  auto make_switch = [&](std::string name, Layer layer, int pod, int index) {
    NodeId id = fabric == Fabric::RouterFabric ? topo.add_router(std::move(name), fat_tree_asn(layer, pod, index))
                                               : topo.add_switch(std::move(name));
    Node& n = topo.node(id);
    n.layer = layer;
    n.pod = pod;
    n.index = index;
    return id;
  };

  std::vector<std::vector<NodeId>> edge(k), agg(k);
  std::vector<NodeId> core;
  for (int j = 0; j < half; ++j)
    for (int i = 0; i < half; ++i) core.push_back(make_switch(fmt::format("core_{}_{}", j, i), Layer::Core, -1, j * half + i));
  for (int p = 0; p < k; ++p) {
    for (int a = 0; a < half; ++a) agg[p].push_back(make_switch(fmt::format("agg_{}_{}", p, a), Layer::Aggregation, p, a));
    for (int e = 0; e < half; ++e) edge[p].push_back(make_switch(fmt::format("edge_{}_{}", p, e), Layer::Edge, p, e));
  }

  for (int p = 0; p < k; ++p) {
    for (int e = 0; e < half; ++e) {
      if (fabric == Fabric::RouterFabric) {
        auto e8 = static_cast<std::uint8_t>(e), p8 = static_cast<std::uint8_t>(p);
        topo.node(edge[p][e]).originated.push_back(Prefix(Ipv4::from_octets(10, p8, e8, 0), 24));
      }
      for (int i = 0; i < half; ++i) {
        auto addr = Ipv4::from_octets(10, static_cast<std::uint8_t>(p), static_cast<std::uint8_t>(e),
                                      static_cast<std::uint8_t>(i + 2));
        NodeId h = topo.add_host(fmt::format("h_{}_{}_{}", p, e, i), addr);
        Node& hn = topo.node(h);
        hn.pod = p;
        hn.index = i;
        topo.connect(edge[p][e], h, cap);
      }
    }
  }
  for (int p = 0; p < k; ++p)
    for (int e = 0; e < half; ++e)
      for (int a = 0; a < half; ++a) topo.connect(edge[p][e], agg[p][a], cap);
  for (int p = 0; p < k; ++p)
    for (int a = 0; a < half; ++a)
      for (int j = 0; j < half; ++j) topo.connect(agg[p][a], core[a * half + j], cap);

  // Core ports end up ordered by pod because pods are wired in order.
  return topo;
}

// ---------------------------------------------------------------------------

std::vector<int> hop_distances(const Topology& topo, NodeId dst) {
  std::vector<int> dist(topo.nodes().size(), -1);
  std::deque<NodeId> frontier{dst};
  dist[dst.value] = 0;
  while (!frontier.empty()) {
    NodeId n = frontier.front();
    frontier.pop_front();
    // Hosts terminate traffic; only the destination itself expands.
    if (topo.node(n).kind == NodeKind::Host && n != dst) continue;
    const auto& ports = topo.node(n).ports;
    for (std::uint32_t p = 0; p < ports.size(); ++p) {
      NodeId m = topo.peer(n, PortId{p}).node;
      if (dist[m.value] < 0) {
        dist[m.value] = dist[n.value] + 1;
        frontier.push_back(m);
      }
    }
  }
  return dist;
}

std::vector<Path> shortest_paths_up_down(const Topology& topo, NodeId src, NodeId dst) {
  if (src == dst) throw std::invalid_argument("shortest_paths_up_down requires src != dst");
  if (topo.node(src).kind != NodeKind::Host || topo.node(dst).kind != NodeKind::Host) {
    throw std::invalid_argument("shortest_paths_up_down requires host endpoints");
  }
  const auto dist = hop_distances(topo, dst);
  if (dist[src.value] < 0) {
    throw NoPath(fmt::format("no path from {} to {}", topo.node(src).name, topo.node(dst).name));
  }

  std::vector<Path> out;
  Path current;
  current.nodes.push_back(src);
  auto extend = [&](auto&& self, NodeId at) -> void {
    if (at == dst) {
      out.push_back(current);
      return;
    }
    if (at != src && topo.node(at).kind == NodeKind::Host) return;
    const auto& ports = topo.node(at).ports;
    for (std::uint32_t p = 0; p < ports.size(); ++p) {
      NodeId next = topo.peer(at, PortId{p}).node;
      if (dist[next.value] != dist[at.value] - 1) continue;
      current.nodes.push_back(next);
      current.channels.push_back(topo.egress_channel(at, PortId{p}));
      self(self, next);
      current.nodes.pop_back();
      current.channels.pop_back();
    }
  };
  extend(extend, src);
  return out;
}

}  // namespace hybridsim
