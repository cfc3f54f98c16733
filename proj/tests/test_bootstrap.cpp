#include "oracles.hpp"

#include "smmimo/bootstrap.hpp"
#include "smmimo/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <optional>
#include <random>

using namespace smmimo;

namespace {

Scenario line_scenario(const std::vector<Point2>& positions, double range) {
  ScenarioConfig c;
  c.pn_count = static_cast<int>(positions.size());
  c.antennas_per_pn = 8;
  c.ut_count = 0;
  c.pn_aperture_m = 0.0;
  c.radio_range_m = range;
  return build_scenario(c, positions);
}

template <typename F>
std::optional<Errc> errc_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

NeighborGraph graph(int n, const std::vector<oracle::Edge>& edges) {
  return graph_from_edges(n, edges);
}

}  // namespace

TEST_CASE("POST counts antennas on passing blocks and picks the lowest as master") {
  ScenarioConfig c;
  c.pn_count = 1;
  c.antennas_per_pn = 1000;
  const auto s = build_scenario(c);
  const auto& pn = s.nodes[0];

  const auto clean = run_post(pn, {});
  CHECK(clean.block_passed == std::vector<bool>{true, true, true, true});
  CHECK(clean.master_block_id == 0);
  CHECK(clean.usable_antennas == 1000);

  const std::vector<int> two{2};
  const auto degraded = run_post(pn, two);
  CHECK(degraded.usable_antennas == 750);
  CHECK(degraded.master_block_id == 0);

  const std::vector<int> first{0};
  CHECK(run_post(pn, first).master_block_id == 1);

  const std::vector<int> all{0, 1, 2, 3};
  CHECK(errc_of([&] { run_post(pn, all); }) == Errc::AllBlocksFailed);
  const std::vector<int> unknown{4};
  CHECK(errc_of([&] { run_post(pn, unknown); }) == Errc::InvalidArgument);
}

TEST_CASE("boot stages advance one at a time") {
  PnState s;
  s = advance_stage(s, BootEvent::PostComplete);
  CHECK(s.stage == BootStage::PostDone);
  s = advance_stage(s, BootEvent::LinksEstablished);
  CHECK(s.stage == BootStage::PostDone);
  CHECK(s.rejections.size() == 1);
  s = advance_stage(s, BootEvent::NosBoot);
  CHECK(s.stage == BootStage::NosBooted);

  const ControlMessage class2{MessageClass::Class2, 0, 1, 5, MessageKind::VirtualMgmt, 0};
  s = receive_message(s, class2);
  CHECK(s.rejections.size() == 2);
  CHECK(s.stage == BootStage::NosBooted);

  s = advance_stage(s, BootEvent::LinksEstablished);
  s = receive_message(s, class2);
  CHECK(s.rejections.size() == 2);
  s = advance_stage(s, BootEvent::VirtualMgmtReady);
  CHECK(s.stage == BootStage::VirtualReady);
  CHECK(s.history.size() == 5);
  s = advance_stage(s, BootEvent::VirtualMgmtReady);
  CHECK(s.stage == BootStage::VirtualReady);
  CHECK(s.rejections.size() == 3);

  CHECK(class_of(MessageKind::VirtualMgmt) == MessageClass::Class2);
  CHECK(class_of(MessageKind::MapExchange) == MessageClass::Class1);
}

TEST_CASE("neighbor discovery uses radio range and Euclidean cost") {
  const auto single = line_scenario({Point2(0, 0)}, 150);
  CHECK(discover_neighbors(single, 0).empty());

  const auto s = line_scenario({Point2(0, 0), Point2(100, 0), Point2(300, 0)}, 150);
  CHECK(discover_neighbors(s, 0) == std::vector<Neighbor>{{1, 100.0}});
  CHECK(discover_neighbors(s, 2).empty());

  const auto twin = line_scenario({Point2(5, 5), Point2(5, 5)}, 10);
  CHECK(discover_neighbors(twin, 0) == std::vector<Neighbor>{{1, 0.0}});
  CHECK(discover_neighbors(twin, 1) == std::vector<Neighbor>{{0, 0.0}});

  auto asym = line_scenario({Point2(0, 0), Point2(100, 0)}, 150);
  asym.nodes[1].radio_range_m = 50;
  CHECK(discover_neighbors(asym, 0).empty());
  CHECK(discover_neighbors(asym, 1).empty());
}

TEST_CASE("connection map picks the cheapest path") {
  // A=0, B=1, C=2; AB 3, BC 4, AC 5.
  const auto tri = graph(3, {{0, 1, 3.0}, {1, 2, 4.0}, {0, 2, 5.0}});
  const auto map = build_connection_map(tri, 0);
  CHECK(map.routes.at(2).next_hop == 2);
  CHECK(map.routes.at(2).cost == 5.0);
  CHECK(map.routes.at(0).cost == 0.0);

  const auto apart = graph(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK(build_connection_map(apart, 0).routes.size() == 2);
  CHECK_FALSE(build_connection_map(apart, 0).routes.contains(2));
}

TEST_CASE("equal-cost alternatives resolve to the lower next hop") {
  const auto g = graph(6, {{0, 5, 2.0}, {5, 1, 3.0}, {0, 2, 3.0}, {2, 1, 2.0}});
  const auto map = build_connection_map(g, 0);
  CHECK(map.routes.at(1).next_hop == 2);
  CHECK(map.routes.at(1).path == std::vector<int>{0, 2, 1});
  const auto brute = oracle::best_path_brute(6, {{0, 5, 2.0}, {5, 1, 3.0}, {0, 2, 3.0}, {2, 1, 2.0}}, 0, 1);
  CHECK(brute.second == map.routes.at(1).path);

  const auto dv = self_assemble(g);
  CHECK(dv.maps[0].routes.at(1).next_hop == 2);
}

TEST_CASE("map exchange on a line sums the edges") {
  const auto line = graph(4, {{0, 1, 1.5}, {1, 2, 2.0}, {2, 3, 4.25}});
  const auto result = exchange_neighbor_maps(line, initial_connection_maps(line));
  CHECK(result.maps[0].routes.at(3).cost == 7.75);
  CHECK(result.maps[0].routes.at(3).next_hop == 1);
  CHECK(result.maps[3].routes.at(0).path == std::vector<int>{3, 2, 1, 0});
  CHECK(result.rounds <= 4);
  for (const auto& m : result.maps) CHECK(m.generation == static_cast<std::uint64_t>(result.rounds));
  for (const auto& msg : result.messages) {
    CHECK(msg.kind == MessageKind::MapExchange);
    CHECK(msg.message_class == MessageClass::Class1);
  }

  const auto again = exchange_neighbor_maps(line, result.maps);
  CHECK(again.rounds == 1);
  for (int s = 0; s < 4; ++s) {
    CHECK(again.maps[s].routes == result.maps[s].routes);
    CHECK(again.maps[s].generation == result.maps[s].generation + 1);
  }
}

TEST_CASE("star leaves reach each other through the hub") {
  std::vector<oracle::Edge> edges;
  for (int leaf = 1; leaf <= 5; ++leaf) edges.emplace_back(0, leaf, 12.5);
  const auto b = self_assemble(graph(6, edges));
  for (int a = 1; a <= 5; ++a) {
    for (int c = 1; c <= 5; ++c) {
      if (a == c) continue;
      CHECK(b.maps[a].routes.at(c).cost == 25.0);
      CHECK(b.maps[a].routes.at(c).next_hop == 0);
    }
  }
}

TEST_CASE("a stale route that outlives the round bound is reported") {
  // A phantom destination advertised by PN0 travels down the line one hop
  // per round and is still moving when the bound of N rounds runs out.
  const auto g = graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  auto maps = initial_connection_maps(g);
  maps[0].routes.emplace(99, Route{99, 1.0, {0, 99}});
  CHECK(errc_of([&] { exchange_neighbor_maps(g, maps); }) == Errc::NonConvergence);
  CHECK(errc_of([&] { exchange_neighbor_maps(g, std::vector<ConnectionMap>(2)); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("stored routes satisfy triangle consistency") {
  std::mt19937_64 rng(11);
  const auto edges = oracle::random_connected_graph(rng, 20, 0.15);
  const auto g = graph(20, edges);
  const auto b = self_assemble(g);
  for (int s = 0; s < 20; ++s) {
    for (const auto& [d, r] : b.maps[s].routes) {
      if (d == s) continue;
      const auto& via = b.maps[r.next_hop].routes.at(d);
      double edge = -1;
      for (const auto& n : g.adjacency[s]) {
        if (n.id == r.next_hop) edge = n.cost;
      }
      REQUIRE(edge >= 0.0);
      CHECK(r.cost == edge + via.cost);
      CHECK(r.cost == path_cost(g, r.path));
    }
  }
}

TEST_CASE("node failure") {
  SUBCASE("articulation point splits the line") {
    const auto b = self_assemble(graph(3, {{0, 1, 1.0}, {1, 2, 1.0}}));
    const auto after = handle_failure(b, 1);
    CHECK_FALSE(after.maps[0].routes.contains(2));
    CHECK_FALSE(after.maps[2].routes.contains(0));
    CHECK(after.maps[1].routes.empty());
  }
  SUBCASE("triangle survivors route direct") {
    const auto b = self_assemble(graph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 5.0}}));
    CHECK(b.maps[0].routes.at(2).next_hop == 1);
    const auto after = handle_failure(b, 1);
    CHECK(after.maps[0].routes.at(2).next_hop == 2);
    CHECK(after.maps[0].routes.at(2).cost == 5.0);
  }
  SUBCASE("isolated node leaves the others alone") {
    const auto b = self_assemble(graph(4, {{0, 1, 1.0}, {1, 2, 2.0}}));
    const auto after = handle_failure(b, 3);
    for (int s = 0; s < 3; ++s) CHECK(after.maps[s].routes == b.maps[s].routes);
  }
  SUBCASE("unknown node") {
    const auto b = self_assemble(graph(2, {{0, 1, 1.0}}));
    CHECK(errc_of([&] { handle_failure(b, 7); }) == Errc::InvalidArgument);
  }
}

TEST_CASE("distance-vector exchange agrees with the path oracles") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const auto edges = oracle::random_connected_graph(rng, n, 0.4);
    const auto g = graph(n, edges);
    const auto b = self_assemble(g);
    const auto dist = oracle::all_pairs(n, edges);
    for (int s = 0; s < n; ++s) {
      CHECK(b.maps[s].routes.size() == static_cast<std::size_t>(n));
      const auto central = build_connection_map(g, s);
      CHECK(central.routes == b.maps[s].routes);
      for (int d = 0; d < n; ++d) {
        CHECK(b.maps[s].routes.at(d).cost == dist[s][d]);
        const auto brute = oracle::best_path_brute(n, edges, s, d);
        if (s != d) CHECK(b.maps[s].routes.at(d).path == brute.second);
      }
    }
  }
}

TEST_CASE("network initialization runs the stages in order") {
  const auto s = line_scenario({Point2(0, 0), Point2(100, 0), Point2(200, 0), Point2(900, 900)}, 150);
  const auto run = run_initialization(s, {{3, {0, 1, 2, 3}}, {1, {1}}});
  CHECK(run.excluded == std::vector<int>{3});
  CHECK(run.post_reports.size() == 3);
  CHECK(run.states[3].stage == BootStage::PowerOn);
  for (int p = 0; p < 3; ++p) {
    CHECK(run.states[p].stage == BootStage::VirtualReady);
    CHECK(run.states[p].rejections.empty());
  }
  CHECK(run.backbone.maps[0].routes.at(2).cost == 200.0);

  std::uint64_t last_class1 = 0, first_class2 = ~std::uint64_t{0};
  int class2 = 0;
  for (const auto& m : run.event_log) {
    if (m.message_class == MessageClass::Class1) {
      last_class1 = std::max(last_class1, m.sim_time);
    } else {
      first_class2 = std::min(first_class2, m.sim_time);
      ++class2;
      CHECK(m.src == 0);
    }
  }
  CHECK(class2 == 3);
  CHECK(last_class1 < first_class2);
  CHECK(std::is_sorted(run.event_log.begin(), run.event_log.end(),
                       [](const ControlMessage& a, const ControlMessage& b) { return a.sim_time < b.sim_time; }));
}
