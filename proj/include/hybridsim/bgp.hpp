#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "hybridsim/connection_manager.hpp"
#include "hybridsim/dataplane.hpp"
#include "hybridsim/engine.hpp"
#include "hybridsim/topology.hpp"

namespace hybridsim {

struct BgpConfig {
  Duration mrai = Duration::milliseconds(50);
  // Install every route tied on AS-path length as one ECMP group.
  bool multipath = false;
  HashFields ecmp_hash = HashFields::SrcDst;
  // Periodic keepalives after establishment. Off by default: they would keep the
  // engine in FTI forever.
  bool keepalives = false;
  Duration keepalive_interval = Duration::seconds(1);
};

enum class SessionState : std::uint8_t { Idle, OpenSent, Established };

struct RibEntry {
  Prefix prefix;
  NodeId next_hop;
  std::vector<std::uint32_t> as_path;
  std::optional<NodeId> learned_from;  // nullopt: locally originated
  bool operator==(const RibEntry&) const = default;
};

struct UpdateOutcome {
  std::vector<Prefix> changed;       // prefixes whose best route changed
  std::vector<NodeId> peers_queued;  // peers with an advertisement queued behind MRAI
  std::size_t loops_dropped = 0;
};

/// Minimal BGP speaker: session handshake, Adj-RIB-In per peer, best-path
/// selection (shortest AS path, then lowest peer router id), MRAI-paced
/// advertisement with Adj-RIB-Out deduplication.
class BgpSpeaker {
 public:
  BgpSpeaker(NodeId router, std::uint32_t asn) : router_(router), asn_(asn) {}

  NodeId router_id() const { return router_; }
  std::uint32_t asn() const { return asn_; }
  SessionState session(NodeId peer) const;

  /// Every route known for `prefix`, local first, then by peer id.
  std::vector<RibEntry> rib(Prefix prefix) const;
  std::set<Prefix> known_prefixes() const;
  /// Best route, or the tied set when multipath is on (sorted by peer id).
  std::vector<RibEntry> best(Prefix prefix, bool multipath) const;

 private:
  friend class BgpNetwork;

  struct Session {
    SessionState state = SessionState::Idle;
    PortId port;
    std::set<Prefix> pending;
    std::map<Prefix, std::vector<std::uint32_t>> advertised;  // Adj-RIB-Out
    std::optional<VirtualTime> last_sent;
    EventHandle flush;
    EventHandle keepalive;
  };

  NodeId router_;
  std::uint32_t asn_;
  std::map<NodeId, Session> sessions_;
  std::map<Prefix, RibEntry> local_;
  std::map<Prefix, std::map<NodeId, RibEntry>> adj_in_;
  std::map<Prefix, std::vector<RibEntry>> installed_;
};

/// All BGP speakers of a topology, wired to the connection manager (message
/// transport) and the data plane (route installation).
class BgpNetwork {
 public:
  BgpNetwork(Engine& engine, ConnectionManager& cm, DataPlane& dataplane, BgpConfig config = {});

  /// /32 routes from every router to its directly attached hosts.
  void install_connected_routes();

  void open_session(NodeId a, NodeId b, VirtualTime at);
  /// One session per router-router link, initiated by the lower node id.
  void open_all_sessions(VirtualTime at);

  UpdateOutcome handle_update(NodeId speaker, NodeId from, const BgpMessage& msg, VirtualTime at);

  const BgpSpeaker& speaker(NodeId router) const { return speakers_.at(router); }
  const std::map<NodeId, BgpSpeaker>& speakers() const { return speakers_; }
  std::uint64_t updates_sent() const { return updates_sent_; }
  std::uint64_t routes_installed() const { return routes_installed_; }
  const BgpConfig& config() const { return config_; }

  /// True when every router has a best route for every originated prefix.
  bool fully_converged() const;

 private:
  BgpSpeaker& mutable_speaker(NodeId router);
  void on_message(NodeId self, const ControlMessage& msg);
  void send(NodeId from, NodeId to, BgpMessage msg);
  void on_established(BgpSpeaker& s, NodeId peer);
  void reselect(BgpSpeaker& s, Prefix prefix, UpdateOutcome* outcome);
  void queue_advertisement(BgpSpeaker& s, NodeId peer, Prefix prefix);
  void flush(NodeId self, NodeId peer);
  void send_keepalive(NodeId self, NodeId peer);

  Engine& engine_;
  ConnectionManager& cm_;
  DataPlane& dp_;
  BgpConfig config_;
  std::map<NodeId, BgpSpeaker> speakers_;
  std::uint64_t updates_sent_ = 0;
  std::uint64_t routes_installed_ = 0;
};

}  // namespace hybridsim
