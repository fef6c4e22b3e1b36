#include "hybridsim/bgp.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "hybridsim/errors.hpp"

namespace hybridsim {

SessionState BgpSpeaker::session(NodeId peer) const {
  auto it = sessions_.find(peer);
  return it == sessions_.end() ? SessionState::Idle : it->second.state;
}

std::vector<RibEntry> BgpSpeaker::rib(Prefix prefix) const {
  std::vector<RibEntry> out;
  if (auto it = local_.find(prefix); it != local_.end()) out.push_back(it->second);
  if (auto it = adj_in_.find(prefix); it != adj_in_.end())
    for (const auto& [peer, entry] : it->second) out.push_back(entry);
  return out;
}

std::set<Prefix> BgpSpeaker::known_prefixes() const {
  std::set<Prefix> out;
  for (const auto& [p, e] : local_) out.insert(p);
  for (const auto& [p, peers] : adj_in_)
    if (!peers.empty()) out.insert(p);
  return out;
}

std::vector<RibEntry> BgpSpeaker::best(Prefix prefix, bool multipath) const {
  if (auto it = local_.find(prefix); it != local_.end()) return {it->second};
  auto it = adj_in_.find(prefix);
  if (it == adj_in_.end() || it->second.empty()) return {};
  std::size_t shortest = SIZE_MAX;
  for (const auto& [peer, e] : it->second) shortest = std::min(shortest, e.as_path.size());
  std::vector<RibEntry> out;
  // adj_in_ is keyed by peer id, so the first tied entry has the lowest router id.
  for (const auto& [peer, e] : it->second) {
    if (e.as_path.size() != shortest) continue;
    out.push_back(e);
    if (!multipath) break;
  }
  return out;
}

// ---------------------------------------------------------------------------

BgpNetwork::BgpNetwork(Engine& engine, ConnectionManager& cm, DataPlane& dataplane, BgpConfig config)
    : engine_(engine), cm_(cm), dp_(dataplane), config_(config) {
  const Topology& topo = dp_.topology();
  for (NodeId r : topo.nodes_of_kind(NodeKind::Router)) {
    BgpSpeaker s(r, topo.node(r).asn);
    for (Prefix p : topo.node(r).originated) {
      RibEntry local{p, r, {}, std::nullopt};
      s.local_[p] = local;
      s.installed_[p] = {local};
    }
    const auto& ports = topo.node(r).ports;
    for (std::uint32_t i = 0; i < ports.size(); ++i) {
      NodeId peer = topo.peer(r, PortId{i}).node;
      if (topo.node(peer).kind == NodeKind::Router && !s.sessions_.count(peer)) s.sessions_[peer].port = PortId{i};
    }
    speakers_.emplace(r, std::move(s));
    cm_.attach(r, [this, r](const ControlMessage& m) { on_message(r, m); });
  }
}

BgpSpeaker& BgpNetwork::mutable_speaker(NodeId router) {
  auto it = speakers_.find(router);
  if (it == speakers_.end()) throw NotAdjacent(fmt::format("node {} is not a BGP router", router.value));
  return it->second;
}

void BgpNetwork::install_connected_routes() {
  const Topology& topo = dp_.topology();
  for (const auto& [r, s] : speakers_) {
    const auto& ports = topo.node(r).ports;
    for (std::uint32_t i = 0; i < ports.size(); ++i) {
      const Node& peer = topo.node(topo.peer(r, PortId{i}).node);
      if (peer.kind == NodeKind::Host) dp_.install_route(r, Prefix(*peer.address, 32), PortGroup{{PortId{i}}, config_.ecmp_hash});
    }
  }
}

void BgpNetwork::open_session(NodeId a, NodeId b, VirtualTime at) {
  BgpSpeaker& sa = mutable_speaker(a);
  BgpSpeaker& sb = mutable_speaker(b);
  auto ia = sa.sessions_.find(b);
  if (ia == sa.sessions_.end()) {
    const auto& topo = dp_.topology();
    throw NotAdjacent(fmt::format("{} and {} are not adjacent", topo.node(a).name, topo.node(b).name));
  }
  if (ia->second.state != SessionState::Idle || sb.sessions_.at(a).state != SessionState::Idle) {
    throw AlreadyEstablished(fmt::format("session {}-{} is not idle", a.value, b.value));
  }
  ia->second.state = SessionState::OpenSent;
  BgpMessage open;
  open.kind = BgpMessage::Kind::Open;
  open.asn = sa.asn();
  cm_.deliver(ControlMessage{a, b, std::move(open)}, at);
}

void BgpNetwork::open_all_sessions(VirtualTime at) {
  for (const auto& [r, s] : speakers_) {
    for (const auto& [peer, sess] : s.sessions_) {
      if (r < peer) open_session(r, peer, at);
    }
  }
}

void BgpNetwork::send(NodeId from, NodeId to, BgpMessage msg) {
  if (msg.kind == BgpMessage::Kind::Update) ++updates_sent_;
  cm_.send(ControlMessage{from, to, std::move(msg)});
}

void BgpNetwork::on_message(NodeId self, const ControlMessage& m) {
  const auto* msg = std::get_if<BgpMessage>(&m.body);
  if (!msg) return;
  BgpSpeaker& s = speakers_.at(self);
  auto it = s.sessions_.find(m.from);
  if (it == s.sessions_.end()) return;
  auto& sess = it->second;

  switch (msg->kind) {
    case BgpMessage::Kind::Open:
      if (sess.state == SessionState::Idle) {
        sess.state = SessionState::OpenSent;
        BgpMessage open;
        open.kind = BgpMessage::Kind::Open;
        open.asn = s.asn();
        send(self, m.from, std::move(open));
      }
      if (sess.state == SessionState::OpenSent) send(self, m.from, BgpMessage{});
      break;
    case BgpMessage::Kind::Keepalive:
      if (sess.state == SessionState::OpenSent) {
        sess.state = SessionState::Established;
        on_established(s, m.from);
      }
      break;
    case BgpMessage::Kind::Update:
      handle_update(self, m.from, *msg, engine_.now());
      break;
    case BgpMessage::Kind::Notification: {
      sess.state = SessionState::Idle;
      sess.pending.clear();
      sess.advertised.clear();
      engine_.cancel(sess.flush);
      engine_.cancel(sess.keepalive);
      std::vector<Prefix> affected;
      for (auto& [p, peers] : s.adj_in_)
        if (peers.erase(m.from)) affected.push_back(p);
      for (Prefix p : affected) reselect(s, p, nullptr);
      break;
    }
  }
}

void BgpNetwork::on_established(BgpSpeaker& s, NodeId peer) {
  for (Prefix p : s.known_prefixes()) queue_advertisement(s, peer, p);
  if (config_.keepalives) {
    NodeId self = s.router_id();
    s.sessions_.at(peer).keepalive = engine_.schedule_in(config_.keepalive_interval, EventKind::ControlTimer,
                                                         [this, self, peer] { send_keepalive(self, peer); });
  }
}

void BgpNetwork::send_keepalive(NodeId self, NodeId peer) {
  auto& sess = speakers_.at(self).sessions_.at(peer);
  if (sess.state != SessionState::Established) return;
  send(self, peer, BgpMessage{});
  sess.keepalive = engine_.schedule_in(config_.keepalive_interval, EventKind::ControlTimer,
                                       [this, self, peer] { send_keepalive(self, peer); });
}

UpdateOutcome BgpNetwork::handle_update(NodeId speaker, NodeId from, const BgpMessage& msg, VirtualTime at) {
  if (at != engine_.now()) throw std::invalid_argument("updates are handled at the current clock");
  if (msg.kind != BgpMessage::Kind::Update) throw std::invalid_argument("handle_update expects an Update");
  BgpSpeaker& s = mutable_speaker(speaker);
  if (s.session(from) != SessionState::Established) {
    throw SessionNotEstablished(fmt::format("session {}-{} is not established", speaker.value, from.value));
  }

  UpdateOutcome outcome;
  std::set<Prefix> touched;
  for (Prefix p : msg.withdrawn) {
    auto it = s.adj_in_.find(p);
    if (it != s.adj_in_.end() && it->second.erase(from)) touched.insert(p);
  }
  for (const auto& a : msg.announced) {
    if (std::find(a.as_path.begin(), a.as_path.end(), s.asn()) != a.as_path.end()) {
      ++outcome.loops_dropped;
      // A looped announcement still replaces whatever this peer sent before.
      auto it = s.adj_in_.find(a.prefix);
      if (it != s.adj_in_.end() && it->second.erase(from)) touched.insert(a.prefix);
      continue;
    }
    s.adj_in_[a.prefix][from] = RibEntry{a.prefix, from, a.as_path, from};
    touched.insert(a.prefix);
  }
  for (Prefix p : touched) reselect(s, p, &outcome);
  return outcome;
}

void BgpNetwork::reselect(BgpSpeaker& s, Prefix prefix, UpdateOutcome* outcome) {
  auto chosen = s.best(prefix, config_.multipath);
  auto& installed = s.installed_[prefix];
  if (chosen == installed) return;
  const bool was_learned = !installed.empty() && installed.front().learned_from.has_value();
  installed = chosen;

  const NodeId self = s.router_id();
  if (chosen.empty()) {
    if (was_learned) dp_.remove_route(self, prefix);
    s.installed_.erase(prefix);
  } else if (chosen.front().learned_from) {
    PortGroup group;
    group.hash = config_.ecmp_hash;
    for (const auto& e : chosen) group.ports.push_back(s.sessions_.at(*e.learned_from).port);
    dp_.install_route(self, prefix, std::move(group));
    ++routes_installed_;
  } else if (was_learned) {
    dp_.remove_route(self, prefix);
  }

  if (outcome) outcome->changed.push_back(prefix);
  for (auto& [peer, sess] : s.sessions_) {
    if (sess.state != SessionState::Established) continue;
    queue_advertisement(s, peer, prefix);
    if (outcome) outcome->peers_queued.push_back(peer);
  }
}

void BgpNetwork::queue_advertisement(BgpSpeaker& s, NodeId peer, Prefix prefix) {
  auto& sess = s.sessions_.at(peer);
  sess.pending.insert(prefix);
  if (engine_.pending(sess.flush)) return;
  VirtualTime at = engine_.now();
  if (sess.last_sent) at = std::max(at, *sess.last_sent + config_.mrai);
  const NodeId self = s.router_id();
  sess.flush = engine_.schedule(at, EventKind::ControlTimer, [this, self, peer] { flush(self, peer); });
}

void BgpNetwork::flush(NodeId self, NodeId peer) {
  BgpSpeaker& s = speakers_.at(self);
  auto& sess = s.sessions_.at(peer);
  auto pending = std::move(sess.pending);
  sess.pending.clear();
  if (sess.state != SessionState::Established) return;

  BgpMessage update;
  update.kind = BgpMessage::Kind::Update;
  for (Prefix p : pending) {
    auto chosen = s.best(p, false);
    std::optional<std::vector<std::uint32_t>> desired;
    if (!chosen.empty() && chosen.front().learned_from != peer) {
      std::vector<std::uint32_t> path{s.asn()};
      path.insert(path.end(), chosen.front().as_path.begin(), chosen.front().as_path.end());
      desired = std::move(path);
    }
    auto current = sess.advertised.find(p);
    if (desired) {
      if (current != sess.advertised.end() && current->second == *desired) continue;
      update.announced.push_back({p, *desired, self});
      sess.advertised[p] = *desired;
    } else if (current != sess.advertised.end()) {
      update.withdrawn.push_back(p);
      sess.advertised.erase(current);
    }
  }
  if (update.announced.empty() && update.withdrawn.empty()) return;
  sess.last_sent = engine_.now();
  send(self, peer, std::move(update));
}

bool BgpNetwork::fully_converged() const {
  std::set<Prefix> originated;
  for (const auto& [r, s] : speakers_)
    for (const auto& [p, e] : s.local_) originated.insert(p);
  for (const auto& [r, s] : speakers_)
    for (Prefix p : originated)
      if (s.best(p, false).empty()) return false;
  return true;
}

}  // namespace hybridsim
