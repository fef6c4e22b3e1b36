#include <gtest/gtest.h>

#include "hybridsim/dataplane.hpp"
#include "hybridsim/errors.hpp"
#include "support/topologies.hpp"

using namespace hybridsim;

namespace {

VirtualTime at_s(double s) { return VirtualTime::from_seconds(s); }

EngineConfig unpaced() {
  EngineConfig c;
  c.realtime = false;
  return c;
}

FlowMatch dst(const char* prefix) {
  FlowMatch m;
  m.dst = Prefix::parse(prefix);
  return m;
}

void add(DataPlane& dp, const Topology& t, const char* sw, FlowMatch m, std::vector<std::uint32_t> ports,
         std::uint16_t prio = 10) {
  PortGroup g;
  for (auto p : ports) g.ports.push_back(PortId{p});
  dp.apply_flow_mod(*t.find(sw), FlowMod{FlowModCommand::Add, m, prio, g});
}

// Forwarding for the diamond with s1 sending b-traffic out of `uplink` (2: s2, 3: s3).
void install_diamond(DataPlane& dp, const Topology& t, std::uint32_t uplink = 2) {
  add(dp, t, "s1", dst("10.0.0.1/32"), {0});
  add(dp, t, "s1", dst("10.0.0.2/32"), {1});
  add(dp, t, "s1", dst("10.0.1.0/24"), {uplink});
  for (const char* mid : {"s2", "s3"}) {
    add(dp, t, mid, dst("10.0.0.0/24"), {0});
    add(dp, t, mid, dst("10.0.1.0/24"), {1});
  }
  add(dp, t, "s4", dst("10.0.1.1/32"), {0});
  add(dp, t, "s4", dst("10.0.1.2/32"), {1});
  add(dp, t, "s4", dst("10.0.0.0/24"), {2});
}

Flow make_flow(const Topology& t, const char* src, const char* dst_name, double demand, std::uint16_t sport = 1000) {
  Flow f;
  f.src_host = *t.find(src);
  f.dst_host = *t.find(dst_name);
  f.key = FlowKey{*t.node(f.src_host).address, *t.node(f.dst_host).address, kProtoUdp, sport, 5001};
  f.demand_bps = demand;
  return f;
}

struct Fixture {
  Topology topo;
  Engine engine{unpaced()};
  DataPlane dp;
  explicit Fixture(Topology t, DataPlaneConfig cfg = {}) : topo(std::move(t)), dp(engine, topo, cfg) {}
};

}  // namespace

TEST(DataPlane, LoneFlowGetsDemandAndArrivesAtItsHost) {
  Fixture fx(test_support::diamond());
  install_diamond(fx.dp, fx.topo);
  auto f = make_flow(fx.topo, "a1", "b2", 1e9);
  fx.dp.start_flow(f, VirtualTime::zero());
  fx.engine.run({at_s(1)});
  EXPECT_DOUBLE_EQ(fx.dp.flow(f.key)->allocated_bps, 1e9);
  auto rec = fx.dp.sample_measurements();
  double sum = 0;
  for (std::size_t i = 0; i < fx.dp.hosts().size(); ++i) {
    const auto& name = fx.topo.node(fx.dp.hosts()[i]).name;
    EXPECT_DOUBLE_EQ(rec.host_arrival_bps[i], name == "b2" ? 1e9 : 0.0) << name;
    sum += rec.host_arrival_bps[i];
  }
  EXPECT_DOUBLE_EQ(rec.aggregate_bps, sum);
}

TEST(DataPlane, NoFlowsSampleIsAllZero) {
  Fixture fx(test_support::diamond());
  auto rec = fx.dp.sample_measurements();
  EXPECT_EQ(rec.aggregate_bps, 0.0);
  for (double v : rec.host_arrival_bps) EXPECT_EQ(v, 0.0);
  for (double u : rec.channel_utilization) EXPECT_EQ(u, 0.0);
}

TEST(DataPlane, StoppingOneOfTwoSharersFreesCapacity) {
  Fixture fx(test_support::diamond());
  install_diamond(fx.dp, fx.topo);
  auto f1 = make_flow(fx.topo, "a1", "b1", 1e9);
  auto f2 = make_flow(fx.topo, "a2", "b2", 1e9);
  fx.dp.start_flow(f1, VirtualTime::zero());
  fx.dp.start_flow(f2, VirtualTime::zero());
  fx.dp.stop_flow(f2.key, at_s(2));
  fx.engine.run({at_s(1)});
  EXPECT_DOUBLE_EQ(fx.dp.flow(f1.key)->allocated_bps, 0.5e9);
  EXPECT_DOUBLE_EQ(fx.dp.flow(f2.key)->allocated_bps, 0.5e9);
  fx.engine.run({at_s(3)});
  EXPECT_DOUBLE_EQ(fx.dp.flow(f1.key)->allocated_bps, 1e9);
  EXPECT_EQ(fx.dp.flow(f2.key), nullptr);
}

TEST(DataPlane, DuplicateAndUnknownFlows) {
  Fixture fx(test_support::diamond());
  install_diamond(fx.dp, fx.topo);
  auto f = make_flow(fx.topo, "a1", "b1", 1e9);
  fx.dp.start_flow(f, at_s(1));
  EXPECT_THROW(fx.dp.start_flow(f, at_s(2)), DuplicateFlow);
  auto g = make_flow(fx.topo, "a2", "b1", 1e9);
  EXPECT_THROW(fx.dp.stop_flow(g.key, at_s(2)), UnknownFlow);
}

TEST(DataPlane, MissingRouteIsRecordedOrThrown) {
  {
    Fixture fx(test_support::diamond());
    auto f = make_flow(fx.topo, "a1", "b1", 1e9);
    fx.dp.start_flow(f, VirtualTime::zero());
    fx.engine.run({at_s(1)});
    EXPECT_EQ(fx.dp.flow(f.key)->allocated_bps, 0.0);
    ASSERT_EQ(fx.dp.routing_errors().size(), 1u);
    EXPECT_EQ(fx.dp.routing_errors()[0].key, f.key);
  }
  {
    Fixture fx(test_support::diamond(), DataPlaneConfig{true});
    auto f = make_flow(fx.topo, "a1", "b1", 1e9);
    fx.dp.start_flow(f, VirtualTime::zero());
    EXPECT_THROW(fx.engine.run({at_s(1)}), NoRoute);
  }
}

TEST(DataPlane, LoopIsDetected) {
  Fixture fx(test_support::diamond());
  add(fx.dp, fx.topo, "s1", dst("10.0.1.0/24"), {2});
  add(fx.dp, fx.topo, "s2", dst("10.0.1.0/24"), {0});
  auto f = make_flow(fx.topo, "a1", "b1", 1e9);
  EXPECT_THROW(fx.dp.trace_path(f.src_host, f.key), RoutingLoop);
}

TEST(DataPlane, FlowModUpdatesPathAtTheSameTimestamp) {
  Fixture fx(test_support::diamond());
  install_diamond(fx.dp, fx.topo, 2);
  auto f = make_flow(fx.topo, "a1", "b1", 1e9);
  fx.dp.start_flow(f, VirtualTime::zero());
  fx.engine.run({at_s(1)});
  auto via_s2 = fx.dp.flow(f.key)->path;
  fx.engine.schedule(at_s(1.5), EventKind::ControlMessageDelivery,
                     [&] { add(fx.dp, fx.topo, "s1", dst("10.0.1.0/24"), {3}); });
  fx.engine.run({at_s(1.5)});
  auto via_s3 = fx.dp.flow(f.key)->path;
  EXPECT_NE(via_s2, via_s3);
  auto expected = fx.dp.trace_path(f.src_host, f.key).channels;
  EXPECT_EQ(via_s3, expected);
  auto s3 = *fx.topo.find("s3");
  auto trace = fx.dp.trace_path(f.src_host, f.key);
  EXPECT_NE(std::find(trace.nodes.begin(), trace.nodes.end(), s3), trace.nodes.end());
}

TEST(DataPlane, ExactMatchShadowsLowerPriorityEntry) {
  Fixture fx(test_support::diamond());
  install_diamond(fx.dp, fx.topo, 2);
  auto f = make_flow(fx.topo, "a1", "b1", 1e9);
  auto s1 = *fx.topo.find("s1");
  EXPECT_EQ(fx.dp.lookup_next_hop(s1, f.key), PortId{2});
  fx.dp.apply_flow_mod(s1, FlowMod{FlowModCommand::Add, FlowMatch::exact(f.key), 100, PortGroup{{PortId{3}}}});
  EXPECT_EQ(fx.dp.lookup_next_hop(s1, f.key), PortId{3});
  EXPECT_EQ(fx.dp.lookup_next_hop(s1, make_flow(fx.topo, "a1", "b1", 1e9, 2000).key), PortId{2});
}

TEST(DataPlane, FlowModValidation) {
  Fixture fx(test_support::diamond());
  auto host = *fx.topo.find("a1");
  EXPECT_THROW(fx.dp.apply_flow_mod(host, FlowMod{FlowModCommand::Add, FlowMatch::any(), 1, PortGroup{{PortId{0}}}}),
               UnknownSwitch);
  EXPECT_THROW(fx.dp.apply_flow_mod(NodeId{999}, FlowMod{}), UnknownSwitch);
  EXPECT_THROW(fx.dp.apply_flow_mod(*fx.topo.find("s2"),
                                    FlowMod{FlowModCommand::Add, FlowMatch::any(), 1, PortGroup{{PortId{7}}}}),
               UnknownPort);
}

TEST(DataPlane, RouterRoutesAndPortValidation) {
  Fixture fx(test_support::two_routers());
  auto r1 = *fx.topo.find("R1");
  EXPECT_THROW(fx.dp.install_route(r1, Prefix::parse("10.2.0.0/24"), PortGroup{{PortId{5}}}), UnknownPort);
  fx.dp.install_route(r1, Prefix::parse("10.2.0.0/16"), PortGroup{{PortId{1}}});
  FlowKey k{Ipv4::parse("10.1.0.2"), Ipv4::parse("10.2.5.9"), kProtoUdp, 1, 2};
  EXPECT_EQ(fx.dp.lookup_next_hop(r1, k), PortId{1});
  fx.dp.install_route(r1, Prefix::parse("10.2.0.0/16"), PortGroup{{PortId{0}}});
  EXPECT_EQ(fx.dp.lookup_next_hop(r1, k), PortId{0});
  EXPECT_TRUE(fx.dp.remove_route(r1, Prefix::parse("10.2.0.0/16")));
  EXPECT_THROW(fx.dp.lookup_next_hop(r1, k), NoRoute);
}

TEST(DataPlane, EntryAndFlowByteCountersIntegrateExactly) {
  Fixture fx(test_support::diamond());
  install_diamond(fx.dp, fx.topo);
  auto f = make_flow(fx.topo, "a1", "b1", 0.5e9);
  fx.dp.start_flow(f, at_s(1));
  fx.engine.run({at_s(5)});
  EXPECT_NEAR(fx.dp.flow_bytes(f.key), 0.25e9, 0.25e9 * 1e-9);
  auto reply = fx.dp.collect_stats(*fx.topo.find("s1"));
  double hit_bytes = 0, idle_bytes = 0, idle_rate = 0;
  for (const auto& e : reply.entries) {
    if (e.flows.empty()) {
      idle_bytes += e.bytes;
      idle_rate += e.rate_bps;
    } else {
      hit_bytes += e.bytes;
      EXPECT_DOUBLE_EQ(e.rate_bps, 0.5e9);
    }
  }
  EXPECT_NEAR(hit_bytes, 0.25e9, 0.25e9 * 1e-9);
  EXPECT_EQ(idle_bytes, 0.0);
  EXPECT_EQ(idle_rate, 0.0);
}

TEST(DataPlane, AllocationsRespectCapacityAndDemand) {
  Fixture fx(test_support::diamond(0.7e9));
  install_diamond(fx.dp, fx.topo);
  std::vector<Flow> flows{make_flow(fx.topo, "a1", "b1", 1e9), make_flow(fx.topo, "a2", "b2", 0.1e9),
                          make_flow(fx.topo, "b1", "a2", 1e9), make_flow(fx.topo, "a1", "a2", 0.4e9)};
  for (auto& f : flows) fx.dp.start_flow(f, VirtualTime::zero());
  fx.engine.run({at_s(1)});
  const auto& load = fx.dp.channel_load();
  for (std::size_t c = 0; c < load.size(); ++c)
    EXPECT_LE(load[c], fx.topo.channel_capacity(ChannelId{static_cast<std::uint32_t>(c)}) * (1 + 1e-9));
  for (const auto& f : flows) EXPECT_LE(fx.dp.flow(f.key)->allocated_bps, f.demand_bps);
  EXPECT_NEAR(fx.dp.flow(flows[0].key)->allocated_bps, 0.6e9, 1);
  EXPECT_NEAR(fx.dp.flow(flows[1].key)->allocated_bps, 0.1e9, 1);
}

TEST(DataPlane, SamplingCadence) {
  Fixture fx(test_support::diamond());
  fx.dp.start_sampling(Duration::milliseconds(100), VirtualTime::zero(), at_s(1));
  fx.engine.run({at_s(2)});
  ASSERT_EQ(fx.dp.series().size(), 11u);
  EXPECT_EQ(fx.dp.series().back().time, at_s(1));
}
