#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridsim/hedera.hpp"
#include "hybridsim/te_apps.hpp"
#include "hybridsim/topology.hpp"
#include "hybridsim/virtual_time.hpp"

namespace hybridsim {

enum class TopologyKind : std::uint8_t { FatTree, Custom };
enum class TrafficKind : std::uint8_t { Permutation, Explicit };

struct NodeSpec {
  std::string name;
  NodeKind kind = NodeKind::Host;
  std::optional<Ipv4> address;   // hosts
  std::uint32_t asn = 0;         // routers
  std::vector<Prefix> originate; // routers
  bool operator==(const NodeSpec&) const = default;
};

struct LinkSpec {
  std::string a;
  std::string b;
  double capacity_bps = 1e9;
  bool operator==(const LinkSpec&) const = default;
};

struct FlowSpec {
  std::string src;
  std::string dst;
  std::uint16_t src_port = 0;  // 0: 10000 + flow index
  std::uint16_t dst_port = 5001;
  std::optional<double> demand_bps;  // default: traffic.demand_bps
  bool operator==(const FlowSpec&) const = default;
};

struct ExperimentSpec {
  TopologyKind topology = TopologyKind::FatTree;
  int k = 4;
  double link_capacity_bps = 1e9;
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  // Only meaningful for fat trees; custom graphs take their fabric from node kinds.
  std::optional<Fabric> fabric;

  TeApp te_app = TeApp::Ecmp5Tuple;
  HederaConfig hedera;

  TrafficKind traffic = TrafficKind::Permutation;
  std::uint64_t seed = 1;
  double demand_bps = 1e9;
  VirtualTime traffic_start = VirtualTime::from_seconds(30);
  std::vector<FlowSpec> flows;

  Duration fti_step = Duration::milliseconds(1);
  Duration quiescence_timeout = Duration::seconds(2);
  VirtualTime end = VirtualTime::from_seconds(60);
  bool realtime = true;

  Duration control_latency = Duration::milliseconds(10);
  Duration mrai = Duration::milliseconds(50);
  bool keepalives = false;

  Duration sample_interval = Duration::milliseconds(100);

  Fabric effective_fabric() const;
  bool operator==(const ExperimentSpec&) const = default;
};

/// Parses and validates a spec. ParseError for malformed text, ValidationError
/// for well-formed text with bad values; both name the key and its line.
ExperimentSpec parse_spec(std::string_view text);
ExperimentSpec load_spec(const std::string& path);
/// Canonical text; parse_spec(render_spec(s)) == s.
std::string render_spec(const ExperimentSpec& spec);
/// Checks cross-field invariants of a programmatically built spec.
void validate(const ExperimentSpec& spec);

Topology build_topology(const ExperimentSpec& spec);

/// Exact decimal seconds to nanoseconds, e.g. "0.001" or "30". Falls back to
/// floating point for exponent forms.
std::optional<Duration> parse_seconds(std::string_view text);

}  // namespace hybridsim
