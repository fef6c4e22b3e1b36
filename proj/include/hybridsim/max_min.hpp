#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hybridsim {

/// One flow as seen by the rate solver: a demand cap and the resources (directed
/// channels) it crosses.
struct FlowDemand {
  double demand = 0.0;
  std::vector<std::size_t> resources;
};

/// Demand-capped max-min fair allocation by progressive filling.
///
/// All unfrozen flows rise together at a common water level. Each round the level
/// moves to the nearest of (a) a resource's equal share of its residual capacity
/// or (b) an unfrozen flow's demand; flows reaching their demand or crossing a
/// saturated resource freeze there. Rates are computed directly from residuals
/// rather than accumulated increments, so rounding error does not build up.
///
/// Throws InvalidPath when a flow names a resource outside `capacities`, and
/// std::invalid_argument for non-positive capacities or negative demands.
std::vector<double> compute_rates(std::span<const FlowDemand> flows, std::span<const double> capacities);

}  // namespace hybridsim
