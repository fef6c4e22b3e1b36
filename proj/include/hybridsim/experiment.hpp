#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hybridsim/dataplane.hpp"
#include "hybridsim/engine.hpp"
#include "hybridsim/experiment_spec.hpp"

namespace hybridsim {

struct RunReport {
  ExperimentSpec spec;
  std::chrono::nanoseconds topology_build_wall{0};
  EngineReport engine;
  std::vector<std::string> host_names;  // column order of series[i].host_arrival_bps
  std::vector<MeasurementRecord> series;
  double offered_bps = 0.0;
  // Mean aggregate arrival over the second half of the traffic interval.
  double steady_mean_aggregate_bps = 0.0;
  // Router fabrics: whether every router had a route to every originated prefix
  // when traffic started.
  std::optional<bool> converged_at_traffic_start;
  // Engine was back in DES (control plane quiet) when traffic started.
  bool quiescent_at_traffic_start = false;
  std::vector<std::string> installed_routes;  // "router prefix -> next hops"
  std::size_t routing_errors = 0;
  std::uint64_t control_messages = 0;
  std::uint64_t hedera_polls = 0;
  std::uint64_t hedera_reroutes = 0;
};

struct RunOptions {
  std::shared_ptr<WallClock> wall;  // default: steady clock
  bool record_trace = false;
};

/// Builds the topology, wires the TE application, schedules traffic, sampling and
/// polls, and runs the engine to spec.end.
RunReport run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

/// First time in the steady window: midpoint of [traffic start, end].
VirtualTime steady_window_start(const ExperimentSpec& spec);

// Output files. Everything except report.txt is a pure function of the spec.
inline constexpr const char* kRatesCsvHeader = "time_s,host_id,arrival_bps";
inline constexpr const char* kModesCsvHeader = "time_s,mode";
std::string rates_csv(const RunReport& report);
std::string modes_csv(const RunReport& report);
std::string report_text(const RunReport& report);
/// Writes rates.csv, modes.csv and report.txt under `dir`, creating it if needed.
void write_outputs(const RunReport& report, const std::filesystem::path& dir);

struct CompareRow {
  std::string label;
  int k = 0;
  TeApp te_app{};
  double topology_build_wall_s = 0.0;
  double run_wall_s = 0.0;
  double steady_mean_aggregate_bps = 0.0;
};

struct CompareResult {
  std::vector<CompareRow> rows;  // sorted by (k, te_app)
  // Set when a run failed; rows then hold only the runs before it.
  std::optional<std::string> failure;
};

/// Runs each spec in turn. Throws std::invalid_argument for fewer than two specs.
CompareResult compare(const std::vector<ExperimentSpec>& specs, const std::vector<std::string>& labels,
                      const RunOptions& options = {});
inline constexpr const char* kCompareCsvHeader = "label,k,te_app,topology_build_wall_s,run_wall_s,steady_mean_aggregate_bps";
std::string compare_csv(const CompareResult& result);

}  // namespace hybridsim
