#include "hybridsim/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "hybridsim/errors.hpp"
#include "hybridsim/te_apps.hpp"
#include "hybridsim/traffic.hpp"

namespace hybridsim {

namespace {

double to_s(std::chrono::nanoseconds d) { return std::chrono::duration<double>(d).count(); }

TrafficPattern plan_traffic(const ExperimentSpec& spec, const Topology& topo) {
  if (spec.traffic == TrafficKind::Permutation) {
    auto hosts = topo.hosts();
    return gen_permutation_traffic(topo, hosts, spec.seed, spec.demand_bps, spec.traffic_start);
  }
  TrafficPattern p;
  p.seed = spec.seed;
  p.start = spec.traffic_start;
  for (std::size_t i = 0; i < spec.flows.size(); ++i) {
    const auto& f = spec.flows[i];
    PlannedFlow planned;
    planned.src = *topo.find(f.src);
    planned.dst = *topo.find(f.dst);
    planned.key.src_ip = *topo.node(planned.src).address;
    planned.key.dst_ip = *topo.node(planned.dst).address;
    planned.key.ip_proto = kProtoUdp;
    planned.key.src_port = f.src_port != 0 ? f.src_port : static_cast<std::uint16_t>(10000 + i);
    planned.key.dst_port = f.dst_port;
    planned.demand_bps = f.demand_bps.value_or(spec.demand_bps);
    p.flows.push_back(planned);
  }
  return p;
}

std::vector<std::string> describe_routes(const Topology& topo, DataPlane& dp) {
  std::vector<std::string> out;
  for (NodeId r : topo.nodes_of_kind(NodeKind::Router)) {
    for (const auto& [prefix, group] : dp.fib(r).routes()) {
      std::string hops;
      for (PortId port : group.ports)
        hops += fmt::format("{}{}", hops.empty() ? "" : ",", topo.node(topo.peer(r, port).node).name);
      out.push_back(fmt::format("{} {} -> {}", topo.node(r).name, prefix.to_string(), hops));
    }
  }
  return out;
}

}  // namespace

VirtualTime steady_window_start(const ExperimentSpec& spec) {
  return spec.traffic_start + Duration::nanoseconds((spec.end - spec.traffic_start).ns() / 2);
}

RunReport run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  validate(spec);
  RunReport report;
  report.spec = spec;

  auto t0 = std::chrono::steady_clock::now();
  Topology topo = build_topology(spec);
  report.topology_build_wall = std::chrono::steady_clock::now() - t0;

  TestbedConfig cfg;
  cfg.engine.fti_step = spec.fti_step;
  cfg.engine.quiescence_timeout = spec.quiescence_timeout;
  cfg.engine.realtime = spec.realtime;
  cfg.engine.record_trace = options.record_trace;
  cfg.control_latency = spec.control_latency;
  Testbed bed(std::move(topo), cfg, options.wall);

  const TrafficPattern pattern = plan_traffic(spec, bed.topology());
  report.offered_bps = pattern.offered_bps();

  BgpConfig bgp;
  bgp.mrai = spec.mrai;
  bgp.keepalives = spec.keepalives;
  switch (spec.te_app) {
    case TeApp::EcmpSrcDst: configure_ecmp(bed, pattern, HashFields::SrcDst, bgp); break;
    case TeApp::Ecmp5Tuple: configure_ecmp(bed, pattern, HashFields::FiveTuple, bgp); break;
    case TeApp::Hedera: configure_hedera(bed, pattern, spec.hedera, spec.end); break;
  }
  bed.dataplane().start_sampling(spec.sample_interval, VirtualTime::zero(), spec.end);
  bed.engine().schedule(spec.traffic_start, EventKind::MeasurementSample, [&report, &bed] {
    report.quiescent_at_traffic_start = bed.engine().mode() == Mode::Des;
    if (BgpNetwork* net = bed.bgp()) report.converged_at_traffic_start = net->fully_converged();
  });

  bed.engine().run(RunBounds{spec.end});
  report.engine = bed.engine().report();

  for (NodeId h : bed.dataplane().hosts()) report.host_names.push_back(bed.topology().node(h).name);
  report.series = bed.dataplane().series();
  const VirtualTime steady = steady_window_start(spec);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& m : report.series) {
    if (m.time < steady || m.time > spec.end) continue;
    sum += m.aggregate_bps;
    ++n;
  }
  report.steady_mean_aggregate_bps = n ? sum / static_cast<double>(n) : 0.0;
  report.installed_routes = describe_routes(bed.topology(), bed.dataplane());
  report.routing_errors = bed.dataplane().routing_errors().size();
  report.control_messages = bed.cm().delivered();
  if (auto* h = bed.hedera()) {
    report.hedera_polls = h->polls();
    report.hedera_reroutes = h->reroutes();
  }
  return report;
}

std::string rates_csv(const RunReport& report) {
  std::string out = kRatesCsvHeader;
  out += '\n';
  for (const auto& m : report.series) {
    const std::string t = format_seconds(m.time);
    for (std::size_t i = 0; i < m.host_arrival_bps.size(); ++i)
      out += fmt::format("{},{},{}\n", t, report.host_names.at(i), m.host_arrival_bps[i]);
    out += fmt::format("{},aggregate,{}\n", t, m.aggregate_bps);
  }
  return out;
}

std::string modes_csv(const RunReport& report) {
  std::string out = kModesCsvHeader;
  out += '\n';
  for (const auto& c : report.engine.mode_trace) out += fmt::format("{},{}\n", format_seconds(c.time), to_string(c.mode));
  return out;
}

std::string report_text(const RunReport& r) {
  const auto& s = r.spec;
  const auto& e = r.engine;
  std::string out;
  auto kv = [&out](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  kv("topology", s.topology == TopologyKind::FatTree ? fmt::format("fattree k={}", s.k) : std::string("custom"));
  kv("fabric", std::string(to_string(s.effective_fabric())));
  kv("te_app", std::string(to_string(s.te_app)));
  kv("seed", std::to_string(s.seed));
  kv("topology_build_wall_s", fmt::format("{:.6f}", to_s(r.topology_build_wall)));
  kv("wall_total_s", fmt::format("{:.6f}", to_s(e.wall_total)));
  kv("wall_des_s", fmt::format("{:.6f}", to_s(e.wall_des)));
  kv("wall_fti_s", fmt::format("{:.6f}", to_s(e.wall_fti)));
  kv("virtual_total_s", format_seconds(e.final_clock));
  kv("virtual_des_s", format_seconds(VirtualTime::zero() + e.virtual_des));
  kv("virtual_fti_s", format_seconds(VirtualTime::zero() + e.virtual_fti));
  kv("events", std::to_string(e.events_executed));
  for (std::size_t i = 0; i < kEventKindCount; ++i)
    kv(fmt::format("events.{}", to_string(static_cast<EventKind>(i))), std::to_string(e.events_by_kind[i]));
  kv("fti_steps", std::to_string(e.fti_steps));
  kv("lag_steps", std::to_string(e.lag_steps));
  kv("lag_total_s", fmt::format("{:.6f}", to_s(e.lag_total)));
  kv("max_lag_s", fmt::format("{:.6f}", to_s(e.max_lag)));
  kv("mode_changes", std::to_string(e.mode_trace.size()));
  kv("trace_digest", fmt::format("{:016x}", e.trace_digest));
  kv("offered_bps", fmt::format("{}", r.offered_bps));
  kv("steady_window_start_s", format_seconds(steady_window_start(s)));
  kv("steady_mean_aggregate_bps", fmt::format("{}", r.steady_mean_aggregate_bps));
  kv("control_messages", std::to_string(r.control_messages));
  kv("routing_errors", std::to_string(r.routing_errors));
  kv("quiescent_at_traffic_start", r.quiescent_at_traffic_start ? "true" : "false");
  if (r.converged_at_traffic_start) kv("converged_at_traffic_start", *r.converged_at_traffic_start ? "true" : "false");
  if (s.te_app == TeApp::Hedera) {
    kv("hedera_polls", std::to_string(r.hedera_polls));
    kv("hedera_reroutes", std::to_string(r.hedera_reroutes));
  }
  kv("installed_routes", std::to_string(r.installed_routes.size()));
  for (const auto& route : r.installed_routes) kv("route", route);
  return out;
}

void write_outputs(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&dir](const char* name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot write {}", (dir / name).string()));
    f << text;
  };
  write("rates.csv", rates_csv(report));
  write("modes.csv", modes_csv(report));
  write("report.txt", report_text(report));
}

CompareResult compare(const std::vector<ExperimentSpec>& specs, const std::vector<std::string>& labels,
                      const RunOptions& options) {
  if (specs.size() < 2) throw std::invalid_argument("compare needs >= 2 specs");
  if (labels.size() != specs.size()) throw std::invalid_argument("one label per spec");
  CompareResult result;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    try {
      RunReport r = run_experiment(specs[i], options);
      result.rows.push_back(CompareRow{labels[i], specs[i].topology == TopologyKind::FatTree ? specs[i].k : 0,
                                       specs[i].te_app, to_s(r.topology_build_wall), to_s(r.engine.wall_total),
                                       r.steady_mean_aggregate_bps});
    } catch (const std::exception& e) {
      result.failure = fmt::format("{}: {}", labels[i], e.what());
      break;
    }
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const CompareRow& a, const CompareRow& b) {
    return std::tie(a.k, a.te_app) < std::tie(b.k, b.te_app);
  });
  return result;
}

std::string compare_csv(const CompareResult& result) {
  std::string out = kCompareCsvHeader;
  out += '\n';
  for (const auto& r : result.rows)
    out += fmt::format("{},{},{},{:.6f},{:.6f},{}\n", r.label, r.k, to_string(r.te_app), r.topology_build_wall_s,
                       r.run_wall_s, r.steady_mean_aggregate_bps);
  return out;
}

}  // namespace hybridsim
