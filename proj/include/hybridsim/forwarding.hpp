#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hybridsim/address.hpp"
#include "hybridsim/ecmp_hash.hpp"
#include "hybridsim/flow.hpp"
#include "hybridsim/topology.hpp"

namespace hybridsim {

/// Output action: a single port, or an ECMP group picked by hashing `hash` fields.
struct PortGroup {
  std::vector<PortId> ports;
  HashFields hash = HashFields::FiveTuple;

  PortId select(const FlowKey& key) const;
  bool operator==(const PortGroup&) const = default;
};

/// Router forwarding table with longest-prefix match.
class Fib {
 public:
  void upsert(Prefix prefix, PortGroup group) { routes_[prefix] = std::move(group); }
  bool remove(Prefix prefix) { return routes_.erase(prefix) != 0; }
  std::optional<std::pair<Prefix, PortGroup>> longest_match(Ipv4 address) const;
  const std::map<Prefix, PortGroup>& routes() const { return routes_; }

 private:
  std::map<Prefix, PortGroup> routes_;
};

/// Wildcardable match over the 5-tuple. Unset fields match anything.
struct FlowMatch {
  std::optional<Prefix> src;
  std::optional<Prefix> dst;
  std::optional<std::uint8_t> ip_proto;
  std::optional<std::uint16_t> src_port;
  std::optional<std::uint16_t> dst_port;

  static FlowMatch exact(const FlowKey& key);
  static FlowMatch any() { return {}; }
  bool matches(const FlowKey& key) const;
  bool operator==(const FlowMatch&) const = default;
};

struct FlowEntry {
  std::uint64_t id = 0;  // unique within the table, stable across modifies
  FlowMatch match;
  std::uint16_t priority = 0;
  PortGroup action;
};

enum class FlowModCommand : std::uint8_t { Add, Delete };

struct FlowMod {
  FlowModCommand command = FlowModCommand::Add;
  FlowMatch match;
  std::uint16_t priority = 0;
  PortGroup action;
};

/// Priority-ordered switch table. Lookups scan entries by descending priority;
/// entries with equal priority are ordered by installation, oldest first, so the
/// order is total. Adding an entry whose (match, priority) already exists
/// replaces its action and keeps its id.
class FlowTable {
 public:
  /// Returns the id of the added/updated entry, or nullopt for a Delete that
  /// matched nothing.
  std::optional<std::uint64_t> apply(const FlowMod& mod);
  const FlowEntry* lookup(const FlowKey& key) const;
  const std::vector<FlowEntry>& entries() const { return entries_; }

 private:
  std::vector<FlowEntry> entries_;
  std::uint64_t next_id_ = 1;
};

}  // namespace hybridsim
