#include <gtest/gtest.h>

#include "hybridsim/ecmp_hash.hpp"
#include "hybridsim/forwarding.hpp"
#include "oracles/fnv1a.hpp"

using namespace hybridsim;

namespace {

FlowKey key(const char* src, const char* dst, std::uint16_t sport = 1000, std::uint16_t dport = 2000) {
  return FlowKey{Ipv4::parse(src), Ipv4::parse(dst), kProtoUdp, sport, dport};
}

}  // namespace

TEST(Address, ParseAndFormat) {
  EXPECT_EQ(Ipv4::parse("10.1.2.3").value, 0x0A010203u);
  EXPECT_EQ(Ipv4::parse("10.1.2.3").to_string(), "10.1.2.3");
  EXPECT_THROW(Ipv4::parse("10.1.2"), std::invalid_argument);
  EXPECT_THROW(Ipv4::parse("10.1.2.256"), std::invalid_argument);
  EXPECT_EQ(Prefix::parse("10.1.0.0/16").to_string(), "10.1.0.0/16");
  EXPECT_EQ(Prefix::parse("10.1.0.7").length, 32);
  EXPECT_THROW(Prefix::parse("10.1.0.7/16"), std::invalid_argument);
  EXPECT_TRUE(Prefix::parse("10.1.0.0/16").contains(Ipv4::parse("10.1.255.1")));
  EXPECT_FALSE(Prefix::parse("10.1.0.0/16").contains(Ipv4::parse("10.2.0.1")));
  EXPECT_TRUE(Prefix::parse("0.0.0.0/0").contains(Ipv4::parse("192.168.1.1")));
}

TEST(EcmpHash, SingleBucketIsAlwaysZero) {
  for (std::uint16_t p = 0; p < 100; ++p) EXPECT_EQ(ecmp_hash(key("10.0.0.1", "10.0.0.2", p), HashFields::FiveTuple, 1), 0u);
}

TEST(EcmpHash, PureFunction) {
  auto k = key("10.3.1.2", "10.0.0.3", 4242, 80);
  for (std::size_t n = 1; n < 9; ++n) EXPECT_EQ(ecmp_hash(k, HashFields::FiveTuple, n), ecmp_hash(k, HashFields::FiveTuple, n));
}

TEST(EcmpHash, MatchesReferenceFnv1aOverBigEndianFields) {
  const auto expected = oracle::fnv1a64_bytes({0x0A, 0x00, 0x00, 0x01, 0x0A, 0x00, 0x00, 0x02}) % 4;
  EXPECT_EQ(ecmp_hash(key("10.0.0.1", "10.0.0.2"), HashFields::SrcDst, 4), expected);

  const auto five = oracle::fnv1a64_bytes({0x0A, 0x00, 0x00, 0x01, 0x0A, 0x00, 0x00, 0x02, 17, 0x04, 0xD2, 0x16, 0x2E});
  EXPECT_EQ(ecmp_hash(key("10.0.0.1", "10.0.0.2", 1234, 5678), HashFields::FiveTuple, 7), five % 7);
}

TEST(EcmpHash, KnownFnvVectors) {
  const std::uint8_t a[] = {'a'};
  EXPECT_EQ(fnv1a64({}), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64(a), 0xaf63dc4c8601ec8cULL);
}

TEST(EcmpHash, ZeroBucketsRejected) {
  EXPECT_THROW(ecmp_hash(key("10.0.0.1", "10.0.0.2"), HashFields::SrcDst, 0), std::invalid_argument);
}

TEST(EcmpHash, SrcDstIgnoresPorts) {
  auto a = key("10.0.1.2", "10.3.0.2", 1111, 80), b = key("10.0.1.2", "10.3.0.2", 2222, 443);
  EXPECT_EQ(ecmp_hash(a, HashFields::SrcDst, 4), ecmp_hash(b, HashFields::SrcDst, 4));
}

TEST(Fib, LongestPrefixWins) {
  Fib fib;
  fib.upsert(Prefix::parse("10.1.0.0/16"), PortGroup{{PortId{1}}});
  fib.upsert(Prefix::parse("10.1.2.0/24"), PortGroup{{PortId{2}}});
  auto m = fib.longest_match(Ipv4::parse("10.1.2.5"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->second.ports.front(), PortId{2});
  EXPECT_EQ(fib.longest_match(Ipv4::parse("10.1.9.5"))->second.ports.front(), PortId{1});
  EXPECT_FALSE(fib.longest_match(Ipv4::parse("10.2.0.1")));
  fib.upsert(Prefix::parse("0.0.0.0/0"), PortGroup{{PortId{9}}});
  EXPECT_EQ(fib.longest_match(Ipv4::parse("10.2.0.1"))->second.ports.front(), PortId{9});
}

TEST(PortGroup, SinglePortIgnoresHashAndGroupsSplitByHash) {
  PortGroup one{{PortId{3}}, HashFields::FiveTuple};
  PortGroup two{{PortId{1}, PortId{2}}, HashFields::FiveTuple};
  bool saw1 = false, saw2 = false;
  for (std::uint16_t p = 1024; p < 1100; ++p) {
    auto k = key("10.0.0.2", "10.1.0.2", p);
    EXPECT_EQ(one.select(k), PortId{3});
    auto chosen = two.select(k);
    EXPECT_EQ(chosen, two.ports[ecmp_hash(k, HashFields::FiveTuple, 2)]);
    saw1 = saw1 || chosen == PortId{1};
    saw2 = saw2 || chosen == PortId{2};
  }
  EXPECT_TRUE(saw1 && saw2);
}

TEST(FlowTable, HigherPriorityShadowsWildcard) {
  FlowTable t;
  auto f = key("10.0.0.2", "10.1.0.2");
  t.apply(FlowMod{FlowModCommand::Add, FlowMatch::any(), 1, PortGroup{{PortId{1}}}});
  EXPECT_EQ(t.lookup(f)->action.ports.front(), PortId{1});
  t.apply(FlowMod{FlowModCommand::Add, FlowMatch::exact(f), 10, PortGroup{{PortId{3}}}});
  EXPECT_EQ(t.lookup(f)->action.ports.front(), PortId{3});
  EXPECT_EQ(t.lookup(key("10.0.0.2", "10.1.0.3"))->action.ports.front(), PortId{1});
  EXPECT_EQ(t.entries().size(), 2u);
}

TEST(FlowTable, ReAddReplacesActionAndKeepsId) {
  FlowTable t;
  FlowMatch m;
  m.dst = Prefix::parse("10.1.0.0/16");
  auto id1 = t.apply(FlowMod{FlowModCommand::Add, m, 5, PortGroup{{PortId{1}}}});
  auto id2 = t.apply(FlowMod{FlowModCommand::Add, m, 5, PortGroup{{PortId{2}}}});
  EXPECT_EQ(id1, id2);
  EXPECT_EQ(t.entries().size(), 1u);
  EXPECT_EQ(t.lookup(key("10.0.0.2", "10.1.3.4"))->action.ports.front(), PortId{2});
}

TEST(FlowTable, EqualPriorityOldestFirstAndDelete) {
  FlowTable t;
  FlowMatch a, b;
  a.dst = Prefix::parse("10.1.0.0/16");
  b.src = Prefix::parse("10.0.0.0/8");
  t.apply(FlowMod{FlowModCommand::Add, a, 5, PortGroup{{PortId{1}}}});
  t.apply(FlowMod{FlowModCommand::Add, b, 5, PortGroup{{PortId{2}}}});
  auto k = key("10.0.0.2", "10.1.0.2");
  EXPECT_EQ(t.lookup(k)->action.ports.front(), PortId{1});
  EXPECT_TRUE(t.apply(FlowMod{FlowModCommand::Delete, a, 5, {}}));
  EXPECT_EQ(t.lookup(k)->action.ports.front(), PortId{2});
  EXPECT_FALSE(t.apply(FlowMod{FlowModCommand::Delete, a, 5, {}}));
  EXPECT_EQ(t.lookup(key("11.0.0.1", "12.0.0.1")), nullptr);
}

TEST(FlowTable, LookupDependsOnlyOnContentsAndKey) {
  FlowTable t1, t2;
  for (auto* t : {&t1, &t2}) {
    t->apply(FlowMod{FlowModCommand::Add, FlowMatch::any(), 1, PortGroup{{PortId{1}, PortId{2}, PortId{3}}}});
  }
  for (std::uint16_t p = 0; p < 50; ++p) {
    auto k = key("10.2.0.2", "10.3.1.3", p);
    EXPECT_EQ(t1.lookup(k)->action.select(k), t2.lookup(k)->action.select(k));
  }
}
