#include "hybridsim/forwarding.hpp"

#include <algorithm>

#include "hybridsim/errors.hpp"

namespace hybridsim {

PortId PortGroup::select(const FlowKey& key) const {
  if (ports.empty()) throw NoRoute("empty port group");
  if (ports.size() == 1) return ports.front();
  return ports[ecmp_hash(key, hash, ports.size())];
}

std::optional<std::pair<Prefix, PortGroup>> Fib::longest_match(Ipv4 address) const {
  for (int len = 32; len >= 0; --len) {
    auto it = routes_.find(Prefix(address, static_cast<std::uint8_t>(len)));
    if (it != routes_.end()) return *it;
  }
  return std::nullopt;
}

FlowMatch FlowMatch::exact(const FlowKey& key) {
  return FlowMatch{Prefix(key.src_ip, 32), Prefix(key.dst_ip, 32), key.ip_proto, key.src_port, key.dst_port};
}

bool FlowMatch::matches(const FlowKey& key) const {
  return (!src || src->contains(key.src_ip)) && (!dst || dst->contains(key.dst_ip)) &&
         (!ip_proto || *ip_proto == key.ip_proto) && (!src_port || *src_port == key.src_port) &&
         (!dst_port || *dst_port == key.dst_port);
}

std::optional<std::uint64_t> FlowTable::apply(const FlowMod& mod) {
  auto same = std::find_if(entries_.begin(), entries_.end(), [&](const FlowEntry& e) {
    return e.priority == mod.priority && e.match == mod.match;
  });
  if (mod.command == FlowModCommand::Delete) {
    if (same == entries_.end()) return std::nullopt;
    std::uint64_t id = same->id;
    entries_.erase(same);
    return id;
  }
  if (same != entries_.end()) {
    same->action = mod.action;
    return same->id;
  }
  // Insert after every entry of greater or equal priority.
  auto pos = std::find_if(entries_.begin(), entries_.end(),
                          [&](const FlowEntry& e) { return e.priority < mod.priority; });
  auto it = entries_.insert(pos, FlowEntry{next_id_++, mod.match, mod.priority, mod.action});
  return it->id;
}

const FlowEntry* FlowTable::lookup(const FlowKey& key) const {
  for (const auto& e : entries_)
    if (e.match.matches(key)) return &e;
  return nullptr;
}

}  // namespace hybridsim
