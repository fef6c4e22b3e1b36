#pragma once

#include <compare>
#include <functional>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hybridsim/address.hpp"
#include "hybridsim/virtual_time.hpp"

namespace hybridsim {

struct NodeId {
  std::uint32_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

/// Index into a node's port list.
struct PortId {
  std::uint32_t value = 0;
  auto operator<=>(const PortId&) const = default;
};

/// Full-duplex cable between two ports.
struct LinkId {
  std::uint32_t value = 0;
  auto operator<=>(const LinkId&) const = default;
};

/// One direction of a link: `2 * link + 0` runs a->b, `2 * link + 1` runs b->a.
/// Capacity is per direction.
struct ChannelId {
  std::uint32_t value = 0;
  LinkId link() const { return LinkId{value / 2}; }
  auto operator<=>(const ChannelId&) const = default;
};

enum class NodeKind : std::uint8_t { Host, Switch, Router };
enum class Layer : std::uint8_t { None, Edge, Aggregation, Core };
enum class Fabric : std::uint8_t { SwitchFabric, RouterFabric };

std::string_view to_string(NodeKind kind);
std::string_view to_string(Fabric fabric);

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::Host;
  std::string name;
  std::optional<Ipv4> address;     // hosts
  std::uint32_t asn = 0;           // routers
  std::vector<Prefix> originated;  // routers: prefixes announced over BGP
  Layer layer = Layer::None;
  int pod = -1;
  int index = -1;
  std::vector<LinkId> ports;  // port i is attached to ports[i]
};

struct Endpoint {
  NodeId node;
  PortId port;
  auto operator<=>(const Endpoint&) const = default;
};

struct Link {
  LinkId id;
  Endpoint a;
  Endpoint b;
  double capacity_bps = 0.0;
  Duration latency;  // carried for completeness; the fluid model ignores it
};

/// Capacitated graph of hosts, switches and routers. Node, port and link ids are
/// dense indices assigned in insertion order.
class Topology {
 public:
  NodeId add_host(std::string name, Ipv4 address);
  NodeId add_switch(std::string name);
  NodeId add_router(std::string name, std::uint32_t asn);
  LinkId connect(NodeId a, NodeId b, double capacity_bps, Duration latency = {});

  const Node& node(NodeId id) const { return nodes_.at(id.value); }
  Node& node(NodeId id) { return nodes_.at(id.value); }
  const Link& link(LinkId id) const { return links_.at(id.value); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  std::vector<NodeId> hosts() const;
  std::vector<NodeId> nodes_of_kind(NodeKind kind) const;

  std::optional<NodeId> find(std::string_view name) const;
  std::optional<NodeId> host_with_address(Ipv4 address) const;

  std::size_t channel_count() const { return links_.size() * 2; }
  /// Channel leaving `node` through `port`.
  ChannelId egress_channel(NodeId node, PortId port) const;
  double channel_capacity(ChannelId channel) const { return link(channel.link()).capacity_bps; }
  /// Node at the far end of `port`.
  Endpoint peer(NodeId node, PortId port) const;
  std::optional<PortId> port_toward(NodeId from, NodeId to) const;
  bool has_port(NodeId node, PortId port) const {
    return node.value < nodes_.size() && port.value < nodes_[node.value].ports.size();
  }

  // Set by build_fat_tree; zero for custom topologies.
  int fat_tree_k = 0;

 private:
  NodeId add_node(Node node);

  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::unordered_map<std::uint32_t, NodeId> by_address_;
};

struct FatTreeParams {
  int k = 4;
  double link_capacity_bps = 1e9;
};

/// Standard k-pod fat-tree: k/2 edge and k/2 aggregation switches per pod,
/// (k/2)^2 core switches, k/2 hosts per edge switch. Host (pod p, edge e, i) gets
/// 10.p.e.(i+2). In RouterFabric mode every switch is a BGP router with a distinct
/// private ASN and each edge router originates its 10.p.e.0/24.
Topology build_fat_tree(const FatTreeParams& params, Fabric fabric);

/// Deterministic private ASN for a fabric router.
std::uint32_t fat_tree_asn(Layer layer, int pod, int index);

struct Path {
  std::vector<NodeId> nodes;
  std::vector<ChannelId> channels;
  bool operator==(const Path&) const = default;
};

/// Hop count from every node to `dst`, never transiting through other hosts.
/// Unreachable nodes get -1.
std::vector<int> hop_distances(const Topology& topo, NodeId dst);

/// All minimum-hop paths from host `src` to host `dst`, in port order. On a
/// fat-tree these are exactly the up-down paths.
std::vector<Path> shortest_paths_up_down(const Topology& topo, NodeId src, NodeId dst);

}  // namespace hybridsim

template <>
struct std::hash<hybridsim::NodeId> {
  std::size_t operator()(hybridsim::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
