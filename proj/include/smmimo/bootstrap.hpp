#ifndef SMMIMO_BOOTSTRAP_HPP
#define SMMIMO_BOOTSTRAP_HPP

#include "smmimo/topology.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace smmimo {

// ---------------------------------------------------------------------------
// Boot state machine
// ---------------------------------------------------------------------------

enum class BootStage { PowerOn, PostDone, NosBooted, BasicLinked, VirtualReady };
enum class BootEvent { PostComplete, NosBoot, LinksEstablished, VirtualMgmtReady };

enum class MessageClass { Class1, Class2 };
enum class MessageKind { Echo, EchoReply, MapExchange, VirtualMgmt };

inline constexpr int kBroadcast = -1;

std::string_view to_string(BootStage stage);
std::string_view to_string(MessageClass cls);
std::string_view to_string(MessageKind kind);

/// Echo, EchoReply and MapExchange travel as class-1 (pre-virtualization)
/// traffic; VirtualMgmt is the only class-2 kind.
MessageClass class_of(MessageKind kind);

struct ControlMessage {
  MessageClass message_class = MessageClass::Class1;
  int src = 0;
  int dst = kBroadcast;
  std::uint64_t sim_time = 0;
  MessageKind kind = MessageKind::Echo;
  std::size_t payload_entries = 0;  ///< routes carried by a MapExchange
};

struct PnState {
  int pn_id = 0;
  BootStage stage = BootStage::PowerOn;
  std::vector<BootStage> history{BootStage::PowerOn};
  std::vector<std::string> rejections;
};

/// Moves one stage forward when `event` is the next legal transition;
/// anything else leaves the stage alone and records a rejection.
PnState advance_stage(PnState state, BootEvent event);

/// Class-2 traffic is only accepted from BasicLinked on; earlier arrivals are
/// recorded as rejections.
PnState receive_message(PnState state, const ControlMessage& message);

struct PostReport {
  int pn_id = 0;
  std::vector<bool> block_passed;
  int master_block_id = 0;
  int usable_antennas = 0;
};

/// Runs every block's self test with the blocks in `fault_set` forced to
/// fail. Throws AllBlocksFailed when nothing passes.
PostReport run_post(const PhysicalNode& pn, std::span<const int> fault_set);

// ---------------------------------------------------------------------------
// Self-assembly
// ---------------------------------------------------------------------------

struct Neighbor {
  int id = 0;
  double cost = 0.0;
  bool operator==(const Neighbor&) const = default;
};

/// Symmetric PN adjacency. Dead nodes keep their index but have no edges.
struct NeighborGraph {
  std::vector<std::vector<Neighbor>> adjacency;
  std::vector<bool> alive;

  int size() const { return static_cast<int>(adjacency.size()); }
  bool operator==(const NeighborGraph&) const = default;
};

/// PNs within radio range of `pn_id` (center to center, using the smaller
/// of the two ranges), sorted by (cost, id). `alive` may be empty.
std::vector<Neighbor> discover_neighbors(const Scenario& scenario, int pn_id,
                                         const std::vector<bool>& alive = {});

NeighborGraph build_neighbor_graph(const Scenario& scenario, const std::vector<bool>& alive = {});

/// Graph from an explicit undirected edge list (u, v, cost).
NeighborGraph graph_from_edges(int node_count, std::span<const std::tuple<int, int, double>> edges);

/// Copy of `graph` with `node` marked dead and every edge touching it removed.
NeighborGraph remove_node(const NeighborGraph& graph, int node);

struct Route {
  int next_hop = 0;
  double cost = 0.0;
  std::vector<int> path;  ///< source first, destination last
  bool operator==(const Route&) const = default;
};

struct ConnectionMap {
  int source = 0;
  std::map<int, Route> routes;  ///< destination -> route; includes self
  std::uint64_t generation = 0;
  bool operator==(const ConnectionMap&) const = default;
};

/// Cost of a path folded from the destination end: e(s,n1) + (e(n1,n2) + ...).
/// This is the order in which distance-vector exchange accumulates costs, so
/// every stored route satisfies cost(s->d) == e(s,nh) + cost(nh->d) exactly.
double path_cost(const NeighborGraph& graph, std::span<const int> path);

/// Centralized best-path tree from `source`: minimum total cost, ties broken
/// by next-hop id and then by lexicographic node sequence.
ConnectionMap build_connection_map(const NeighborGraph& graph, int source);

/// Each alive PN's first map: itself plus its direct neighbors.
std::vector<ConnectionMap> initial_connection_maps(const NeighborGraph& graph);

struct ExchangeResult {
  std::vector<ConnectionMap> maps;
  int rounds = 0;
  std::vector<ControlMessage> messages;
};

/// Synchronous distance-vector rounds until no table changes. Throws
/// NonConvergence if more rounds than nodes are needed.
ExchangeResult exchange_neighbor_maps(const NeighborGraph& graph, std::vector<ConnectionMap> maps,
                                      std::uint64_t start_time = 0);

struct Backbone {
  NeighborGraph graph;
  std::vector<ConnectionMap> maps;
  int rounds = 0;
  bool operator==(const Backbone& other) const {
    return graph == other.graph && maps == other.maps && rounds == other.rounds;
  }
};

/// Initial maps followed by exchange to a fixpoint.
Backbone self_assemble(const NeighborGraph& graph);

/// Purges the dead PN and re-runs discovery and exchange on what is left.
Backbone handle_failure(const Backbone& backbone, int dead_pn);

// ---------------------------------------------------------------------------
// Whole-network initialization
// ---------------------------------------------------------------------------

struct InitializationRun {
  std::vector<PnState> states;
  std::vector<PostReport> post_reports;  ///< one per booted PN
  std::vector<int> excluded;             ///< PNs whose POST failed entirely
  Backbone backbone;
  std::vector<ControlMessage> event_log;
};

/// POST, NOS boot, class-1 self-assembly, then class-2 virtualization
/// management from the lowest-id surviving PN. `faults` maps PN id to the
/// blocks forced to fail.
InitializationRun run_initialization(const Scenario& scenario,
                                     const std::map<int, std::vector<int>>& faults = {});

}  // namespace smmimo

#endif  // SMMIMO_BOOTSTRAP_HPP
