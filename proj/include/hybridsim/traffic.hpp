#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hybridsim/flow.hpp"
#include "hybridsim/topology.hpp"
#include "hybridsim/virtual_time.hpp"

namespace hybridsim {

struct PlannedFlow {
  NodeId src;
  NodeId dst;
  FlowKey key;
  double demand_bps = 0.0;
};

struct TrafficPattern {
  std::uint64_t seed = 0;
  VirtualTime start;
  std::vector<PlannedFlow> flows;

  double offered_bps() const;
};

/// Uniform integer in [0, n) from a 64-bit Mersenne Twister by rejection.
/// Unlike std::uniform_int_distribution, the result is identical on every
/// standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

/// Derangement of `hosts`: each host sends one flow of `demand_bps` and receives
/// exactly one. Fisher-Yates shuffles are drawn from `seed` and rejected until
/// no host maps to itself. UDP, with source and destination ports uniform in
/// [1024, 65535]. Throws TooFewHosts for fewer than two hosts.
TrafficPattern gen_permutation_traffic(const Topology& topo, std::span<const NodeId> hosts, std::uint64_t seed,
                                       double demand_bps, VirtualTime start);

}  // namespace hybridsim
