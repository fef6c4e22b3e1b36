#include "hybridsim/traffic.hpp"

#include <numeric>

#include <fmt/format.h>

#include "hybridsim/errors.hpp"

namespace hybridsim {

double TrafficPattern::offered_bps() const {
  double total = 0.0;
  for (const auto& f : flows) total += f.demand_bps;
  return total;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  while (true) {
    std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

TrafficPattern gen_permutation_traffic(const Topology& topo, std::span<const NodeId> hosts, std::uint64_t seed,
                                       double demand_bps, VirtualTime start) {
  const std::size_t n = hosts.size();
  if (n < 2) throw TooFewHosts(fmt::format("permutation traffic needs at least 2 hosts, got {}", n));

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> target(n);
  while (true) {
    std::iota(target.begin(), target.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(target[i], target[uniform_below(rng, i + 1)]);
    bool fixed_point = false;
    for (std::size_t i = 0; i < n && !fixed_point; ++i) fixed_point = target[i] == i;
    if (!fixed_point) break;
  }

  TrafficPattern pattern;
  pattern.seed = seed;
  pattern.start = start;
  for (std::size_t i = 0; i < n; ++i) {
    PlannedFlow f;
    f.src = hosts[i];
    f.dst = hosts[target[i]];
    f.key.src_ip = *topo.node(f.src).address;
    f.key.dst_ip = *topo.node(f.dst).address;
    f.key.ip_proto = kProtoUdp;
    f.key.src_port = static_cast<std::uint16_t>(1024 + uniform_below(rng, 65536 - 1024));
    f.key.dst_port = static_cast<std::uint16_t>(1024 + uniform_below(rng, 65536 - 1024));
    f.demand_bps = demand_bps;
    pattern.flows.push_back(f);
  }
  return pattern;
}

}  // namespace hybridsim
