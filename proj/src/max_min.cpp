#include "hybridsim/max_min.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "hybridsim/errors.hpp"

namespace hybridsim {

namespace {
// Relative slack when deciding that a share or demand sits at the current level.
constexpr double kTieTolerance = 1e-12;
}  // namespace

std::vector<double> compute_rates(std::span<const FlowDemand> flows, std::span<const double> capacities) {
  const std::size_t nf = flows.size();
  const std::size_t nr = capacities.size();
  for (double c : capacities)
    if (!(c > 0.0)) throw std::invalid_argument("resource capacities must be positive");

  std::vector<double> rate(nf, 0.0);
  std::vector<bool> frozen(nf, false);
  std::vector<std::size_t> unfrozen_on(nr, 0);
  std::vector<double> frozen_load(nr, 0.0);
  std::size_t remaining = 0;

  for (std::size_t f = 0; f < nf; ++f) {
    if (flows[f].demand < 0.0) throw std::invalid_argument("flow demand must be non-negative");
    for (std::size_t r : flows[f].resources) {
      if (r >= nr) throw InvalidPath(fmt::format("flow {} references missing resource {}", f, r));
    }
    if (flows[f].demand == 0.0) {
      frozen[f] = true;
      continue;
    }
    for (std::size_t r : flows[f].resources) ++unfrozen_on[r];
    ++remaining;
  }

  auto share = [&](std::size_t r) { return std::max(0.0, capacities[r] - frozen_load[r]) / unfrozen_on[r]; };

  while (remaining > 0) {
    double level = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < nr; ++r)
      if (unfrozen_on[r] > 0) level = std::min(level, share(r));
    for (std::size_t f = 0; f < nf; ++f)
      if (!frozen[f]) level = std::min(level, flows[f].demand);
    const double cutoff = level * (1.0 + kTieTolerance);

    std::vector<bool> saturated(nr, false);
    for (std::size_t r = 0; r < nr; ++r) saturated[r] = unfrozen_on[r] > 0 && share(r) <= cutoff;

    std::vector<std::size_t> freezing;
    for (std::size_t f = 0; f < nf; ++f) {
      if (frozen[f]) continue;
      if (flows[f].demand <= cutoff) {
        rate[f] = std::min(flows[f].demand, level);
        freezing.push_back(f);
        continue;
      }
      bool bottlenecked = std::any_of(flows[f].resources.begin(), flows[f].resources.end(),
                                      [&](std::size_t r) { return saturated[r]; });
      if (bottlenecked) {
        rate[f] = level;
        freezing.push_back(f);
      }
    }
    for (std::size_t f : freezing) {
      frozen[f] = true;
      --remaining;
      for (std::size_t r : flows[f].resources) {
        --unfrozen_on[r];
        frozen_load[r] += rate[f];
      }
    }
  }
  return rate;
}

}  // namespace hybridsim
