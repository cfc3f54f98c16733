#include "smmimo/bootstrap.hpp"

#include "smmimo/error.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>

namespace smmimo {

std::string_view to_string(BootStage stage) {
  switch (stage) {
    case BootStage::PowerOn: return "PowerOn";
    case BootStage::PostDone: return "PostDone";
    case BootStage::NosBooted: return "NosBooted";
    case BootStage::BasicLinked: return "BasicLinked";
    case BootStage::VirtualReady: return "VirtualReady";
  }
  return "?";
}

std::string_view to_string(MessageClass cls) {
  return cls == MessageClass::Class1 ? "Class1" : "Class2";
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Echo: return "Echo";
    case MessageKind::EchoReply: return "EchoReply";
    case MessageKind::MapExchange: return "MapExchange";
    case MessageKind::VirtualMgmt: return "VirtualMgmt";
  }
  return "?";
}

MessageClass class_of(MessageKind kind) {
  return kind == MessageKind::VirtualMgmt ? MessageClass::Class2 : MessageClass::Class1;
}

namespace {

BootEvent expected_event(BootStage stage) {
  switch (stage) {
    case BootStage::PowerOn: return BootEvent::PostComplete;
    case BootStage::PostDone: return BootEvent::NosBoot;
    case BootStage::NosBooted: return BootEvent::LinksEstablished;
    default: return BootEvent::VirtualMgmtReady;
  }
}

std::string_view event_name(BootEvent event) {
  switch (event) {
    case BootEvent::PostComplete: return "PostComplete";
    case BootEvent::NosBoot: return "NosBoot";
    case BootEvent::LinksEstablished: return "LinksEstablished";
    case BootEvent::VirtualMgmtReady: return "VirtualMgmtReady";
  }
  return "?";
}

std::optional<double> edge_cost(const NeighborGraph& graph, int u, int v) {
  for (const auto& n : graph.adjacency[u]) {
    if (n.id == v) return n.cost;
  }
  return std::nullopt;
}

void sort_neighbors(std::vector<Neighbor>& list) {
  std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.cost != b.cost ? a.cost < b.cost : a.id < b.id;
  });
}

bool better(double cost_a, const std::vector<int>& path_a, double cost_b,
            const std::vector<int>& path_b) {
  if (cost_a != cost_b) return cost_a < cost_b;
  return path_a < path_b;
}

}  // namespace

PnState advance_stage(PnState state, BootEvent event) {
  if (state.stage != BootStage::VirtualReady && event == expected_event(state.stage)) {
    state.stage = static_cast<BootStage>(static_cast<int>(state.stage) + 1);
    state.history.push_back(state.stage);
  } else {
    state.rejections.push_back(std::string(event_name(event)) + " rejected in stage " +
                               std::string(to_string(state.stage)));
  }
  return state;
}

PnState receive_message(PnState state, const ControlMessage& message) {
  if (message.message_class == MessageClass::Class2 && state.stage < BootStage::BasicLinked) {
    state.rejections.push_back("Class2 " + std::string(to_string(message.kind)) +
                               " rejected in stage " + std::string(to_string(state.stage)));
  }
  return state;
}

PostReport run_post(const PhysicalNode& pn, std::span<const int> fault_set) {
  PostReport report;
  report.pn_id = pn.id;
  report.block_passed.assign(pn.blocks.size(), true);
  for (int block_id : fault_set) {
    if (block_id < 0 || block_id >= static_cast<int>(pn.blocks.size())) {
      throw Error(Errc::InvalidArgument, "fault_set names unknown block " + std::to_string(block_id));
    }
    report.block_passed[block_id] = false;
  }
  report.master_block_id = -1;
  for (std::size_t b = 0; b < pn.blocks.size(); ++b) {
    const bool passed = report.block_passed[b] && pn.blocks[b].post_passed;
    report.block_passed[b] = passed;
    if (!passed) continue;
    report.usable_antennas += pn.blocks[b].radio_count;
    if (report.master_block_id < 0) report.master_block_id = static_cast<int>(b);
  }
  if (report.master_block_id < 0) {
    throw Error(Errc::AllBlocksFailed, "PN " + std::to_string(pn.id) + " has no passing block");
  }
  return report;
}

std::vector<Neighbor> discover_neighbors(const Scenario& scenario, int pn_id,
                                         const std::vector<bool>& alive) {
  auto is_alive = [&](int id) { return alive.empty() || alive[id]; };
  std::vector<Neighbor> out;
  if (!is_alive(pn_id)) return out;
  const auto& self = scenario.nodes.at(pn_id);
  for (const auto& other : scenario.nodes) {
    if (other.id == pn_id || !is_alive(other.id)) continue;
    const double d = (other.position - self.position).norm();
    if (d <= std::min(self.radio_range_m, other.radio_range_m)) out.push_back({other.id, d});
  }
  sort_neighbors(out);
  return out;
}

NeighborGraph build_neighbor_graph(const Scenario& scenario, const std::vector<bool>& alive) {
  NeighborGraph g;
  const int n = static_cast<int>(scenario.nodes.size());
  g.alive = alive.empty() ? std::vector<bool>(n, true) : alive;
  g.adjacency.resize(n);
  for (int p = 0; p < n; ++p) g.adjacency[p] = discover_neighbors(scenario, p, g.alive);
  return g;
}

NeighborGraph graph_from_edges(int node_count,
                               std::span<const std::tuple<int, int, double>> edges) {
  NeighborGraph g;
  g.adjacency.resize(node_count);
  g.alive.assign(node_count, true);
  auto upsert = [&g](int u, int v, double c) {
    for (auto& n : g.adjacency[u]) {
      if (n.id == v) {
        n.cost = std::min(n.cost, c);
        return;
      }
    }
    g.adjacency[u].push_back({v, c});
  };
  for (const auto& [u, v, c] : edges) {
    if (u == v || u < 0 || v < 0 || u >= node_count || v >= node_count || !(c >= 0.0)) {
      throw Error(Errc::InvalidArgument, "bad edge");
    }
    upsert(u, v, c);
    upsert(v, u, c);
  }
  for (auto& list : g.adjacency) sort_neighbors(list);
  return g;
}

NeighborGraph remove_node(const NeighborGraph& graph, int node) {
  if (node < 0 || node >= graph.size()) {
    throw Error(Errc::InvalidArgument, "unknown PN " + std::to_string(node));
  }
  NeighborGraph g = graph;
  g.alive[node] = false;
  g.adjacency[node].clear();
  for (auto& list : g.adjacency) {
    std::erase_if(list, [node](const Neighbor& n) { return n.id == node; });
  }
  return g;
}

double path_cost(const NeighborGraph& graph, std::span<const int> path) {
  double cost = 0.0;
  for (std::size_t i = path.size(); i-- > 1;) {
    auto e = edge_cost(graph, path[i - 1], path[i]);
    if (!e) throw Error(Errc::InvalidArgument, "path uses a missing edge");
    cost = *e + cost;
  }
  return cost;
}

ConnectionMap build_connection_map(const NeighborGraph& graph, int source) {
  ConnectionMap map;
  map.source = source;
  if (source < 0 || source >= graph.size() || !graph.alive[source]) return map;

  using Label = std::pair<double, std::vector<int>>;
  std::vector<std::optional<Label>> best(graph.size());
  std::vector<bool> done(graph.size(), false);
  std::set<Label> frontier;
  best[source] = Label{0.0, {source}};
  frontier.insert(*best[source]);

  while (!frontier.empty()) {
    Label current = *frontier.begin();
    frontier.erase(frontier.begin());
    const int u = current.second.back();
    if (done[u]) continue;
    done[u] = true;
    for (const auto& n : graph.adjacency[u]) {
      if (done[n.id]) continue;
      Label candidate{current.first + n.cost, current.second};
      candidate.second.push_back(n.id);
      auto& slot = best[n.id];
      if (!slot || better(candidate.first, candidate.second, slot->first, slot->second)) {
        if (slot) frontier.erase(*slot);
        slot = candidate;
        frontier.insert(std::move(candidate));
      }
    }
  }

  for (int d = 0; d < graph.size(); ++d) {
    if (!best[d]) continue;
    const auto& path = best[d]->second;
    Route r;
    r.path = path;
    r.next_hop = path.size() > 1 ? path[1] : source;
    r.cost = path_cost(graph, path);
    map.routes.emplace(d, std::move(r));
  }
  return map;
}

std::vector<ConnectionMap> initial_connection_maps(const NeighborGraph& graph) {
  std::vector<ConnectionMap> maps(graph.size());
  for (int s = 0; s < graph.size(); ++s) {
    maps[s].source = s;
    if (!graph.alive[s]) continue;
    maps[s].routes.emplace(s, Route{s, 0.0, {s}});
    for (const auto& n : graph.adjacency[s]) {
      maps[s].routes.emplace(n.id, Route{n.id, n.cost, {s, n.id}});
    }
  }
  return maps;
}

ExchangeResult exchange_neighbor_maps(const NeighborGraph& graph, std::vector<ConnectionMap> maps,
                                      std::uint64_t start_time) {
  if (static_cast<int>(maps.size()) != graph.size()) {
    throw Error(Errc::InvalidArgument, "one connection map per PN required");
  }
  ExchangeResult result;
  const int n = graph.size();
  bool changed = true;
  while (changed) {
    if (result.rounds >= std::max(n, 1)) {
      throw Error(Errc::NonConvergence,
                  "no fixpoint after " + std::to_string(result.rounds) + " rounds");
    }
    ++result.rounds;
    changed = false;
    std::vector<ConnectionMap> next(n);
    for (int s = 0; s < n; ++s) {
      next[s].source = s;
      next[s].generation = maps[s].generation + 1;
      if (!graph.alive[s]) continue;
      for (const auto& nb : graph.adjacency[s]) {
        result.messages.push_back({MessageClass::Class1, s, nb.id,
                                   start_time + static_cast<std::uint64_t>(result.rounds),
                                   MessageKind::MapExchange, maps[s].routes.size()});
      }
      auto& table = next[s].routes;
      table.emplace(s, Route{s, 0.0, {s}});
      for (const auto& nb : graph.adjacency[s]) {
        for (const auto& [dst, advertised] : maps[nb.id].routes) {
          if (dst == s) continue;
          if (std::find(advertised.path.begin(), advertised.path.end(), s) !=
              advertised.path.end()) {
            continue;  // would loop back through us
          }
          Route candidate;
          candidate.next_hop = nb.id;
          candidate.cost = nb.cost + advertised.cost;
          candidate.path.reserve(advertised.path.size() + 1);
          candidate.path.push_back(s);
          candidate.path.insert(candidate.path.end(), advertised.path.begin(),
                                advertised.path.end());
          auto it = table.find(dst);
          if (it == table.end()) {
            table.emplace(dst, std::move(candidate));
          } else if (better(candidate.cost, candidate.path, it->second.cost, it->second.path)) {
            it->second = std::move(candidate);
          }
        }
      }
      if (table != maps[s].routes) changed = true;
    }
    maps = std::move(next);
  }
  result.maps = std::move(maps);
  return result;
}

Backbone self_assemble(const NeighborGraph& graph) {
  auto exchange = exchange_neighbor_maps(graph, initial_connection_maps(graph));
  return {graph, std::move(exchange.maps), exchange.rounds};
}

Backbone handle_failure(const Backbone& backbone, int dead_pn) {
  return self_assemble(remove_node(backbone.graph, dead_pn));
}

InitializationRun run_initialization(const Scenario& scenario,
                                     const std::map<int, std::vector<int>>& faults) {
  InitializationRun run;
  const int n = static_cast<int>(scenario.nodes.size());
  std::vector<bool> alive(n, true);
  std::uint64_t clock = 0;
  run.states.resize(n);
  for (int p = 0; p < n; ++p) run.states[p].pn_id = p;

  // Stage 1: POST reported to the master BIOS, then the NOS boots.
  ++clock;
  for (int p = 0; p < n; ++p) {
    auto it = faults.find(p);
    std::span<const int> fault_set;
    if (it != faults.end()) fault_set = it->second;
    try {
      run.post_reports.push_back(run_post(scenario.nodes[p], fault_set));
      run.states[p] = advance_stage(std::move(run.states[p]), BootEvent::PostComplete);
    } catch (const Error& e) {
      if (e.code() != Errc::AllBlocksFailed) throw;
      alive[p] = false;
      run.excluded.push_back(p);
    }
  }
  ++clock;
  for (int p = 0; p < n; ++p) {
    if (alive[p]) run.states[p] = advance_stage(std::move(run.states[p]), BootEvent::NosBoot);
  }

  // Stage 2: echo discovery and class-1 map exchange.
  ++clock;
  NeighborGraph graph = build_neighbor_graph(scenario, alive);
  for (int p = 0; p < n; ++p) {
    if (alive[p]) run.event_log.push_back({MessageClass::Class1, p, kBroadcast, clock, MessageKind::Echo, 0});
  }
  ++clock;
  for (int p = 0; p < n; ++p) {
    for (const auto& nb : graph.adjacency[p]) {
      run.event_log.push_back({MessageClass::Class1, p, nb.id, clock, MessageKind::EchoReply, 0});
    }
  }
  auto exchange = exchange_neighbor_maps(graph, initial_connection_maps(graph), clock);
  clock += static_cast<std::uint64_t>(exchange.rounds);
  run.event_log.insert(run.event_log.end(), exchange.messages.begin(), exchange.messages.end());
  run.backbone = {graph, std::move(exchange.maps), exchange.rounds};
  for (int p = 0; p < n; ++p) {
    if (alive[p]) {
      run.states[p] = advance_stage(std::move(run.states[p]), BootEvent::LinksEstablished);
    }
  }

  // Stages 3-4: the head PN drives virtualization over class-2 messages.
  ++clock;
  const auto head = std::find(alive.begin(), alive.end(), true);
  if (head != alive.end()) {
    const int head_id = static_cast<int>(head - alive.begin());
    const auto& reachable = run.backbone.maps[head_id].routes;
    for (int p = 0; p < n; ++p) {
      if (!reachable.contains(p)) continue;
      ControlMessage msg{MessageClass::Class2, head_id, p, clock, MessageKind::VirtualMgmt, 0};
      run.event_log.push_back(msg);
      run.states[p] = receive_message(std::move(run.states[p]), msg);
    }
    ++clock;
    for (int p = 0; p < n; ++p) {
      if (reachable.contains(p)) {
        run.states[p] = advance_stage(std::move(run.states[p]), BootEvent::VirtualMgmtReady);
      }
    }
  }
  return run;
}

}  // namespace smmimo
