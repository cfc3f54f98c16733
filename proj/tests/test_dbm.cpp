#include "smmimo/dbm.hpp"
#include "smmimo/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

using namespace smmimo;

namespace {

template <typename F>
std::optional<Errc> errc_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// One antenna per PN at the given points, one UT at `ut`.
Scenario point_scenario(const std::vector<Point2>& antennas, const Point2& ut, double noise = 1e-13) {
  ScenarioConfig c;
  c.pn_count = static_cast<int>(antennas.size());
  c.antennas_per_pn = 1;
  c.blocks_per_pn = 1;
  c.pn_aperture_m = 0.0;
  c.ut_count = 1;
  c.noise_floor = noise;
  auto s = build_scenario(c, antennas);
  s.uts[0].position = ut;
  return s;
}

std::vector<PilotReception> receptions(const std::vector<double>& sqw) {
  std::vector<PilotReception> out;
  for (std::size_t i = 0; i < sqw.size(); ++i) {
    out.push_back({static_cast<int>(i), 0, 10.0 * static_cast<double>(i + 1), sqw[i]});
  }
  return out;
}

}  // namespace

TEST_CASE("pathloss gain clamps the near field") {
  CHECK(pathloss_gain(0.0, 3.8) == 1.0);
  CHECK(pathloss_gain(0.5, 3.8) == 1.0);
  CHECK(pathloss_gain(10.0, 2.0) == doctest::Approx(0.01));
}

TEST_CASE("pilot SQW is received power relative to the strongest antenna") {
  const auto s = point_scenario({Point2(10, 0), Point2(20, 0)}, Point2(0, 0));
  const auto r = broadcast_pilot(s, 0);
  REQUIRE(r.size() == 2);
  CHECK(r[0].antenna_id == 0);
  CHECK(r[0].sqw == 1.0);
  CHECK(r[0].delay_distance == doctest::Approx(10.0));
  CHECK(r[1].sqw == doctest::Approx(std::pow(0.5, 3.8)));
  CHECK(r[1].sqw == doctest::Approx(0.0718).epsilon(1e-3));

  const auto co = point_scenario({Point2(30, 0), Point2(5, 5)}, Point2(5, 5));
  const auto rc = broadcast_pilot(co, 0);
  CHECK(rc[0].antenna_id == 1);
  CHECK(rc[0].sqw == 1.0);
  CHECK(rc[0].delay_distance == 0.0);
}

TEST_CASE("a pilot nobody hears is a coverage hole") {
  const auto s = point_scenario({Point2(10, 0)}, Point2(0, 0), 1.0);
  CHECK(errc_of([&] { broadcast_pilot(s, 0); }) == Errc::NoCoverage);

  const std::vector<int> ids{0, 1};
  const std::vector<double> delays{1.0, 2.0};
  const std::vector<double> powers{1e-3, 1e-9};
  const auto r = receptions_from_powers(4, ids, delays, powers, 1e-6);
  REQUIRE(r.size() == 1);
  CHECK(r[0].ut_id == 4);
}

TEST_CASE("range noise perturbs delays reproducibly") {
  auto s = point_scenario({Point2(10, 0), Point2(20, 0)}, Point2(0, 0));
  PilotOptions o{0.5, 3, 1};
  const auto a = broadcast_pilot(s, 0, o);
  const auto b = broadcast_pilot(s, 0, o);
  CHECK(a == b);
  CHECK(a[0].delay_distance != 10.0);
  o.epoch = 2;
  CHECK(broadcast_pilot(s, 0, o) != a);
}

TEST_CASE("candidate selection applies the acceptance ratio") {
  const auto r = receptions({1.0, 0.5, 0.1});
  CHECK(select_candidates(r, 0.5).antenna_ids == std::vector<int>{0, 1});
  CHECK(select_candidates(r, kMuFloor).antenna_ids == std::vector<int>{0, 1, 2});
  CHECK(select_candidates(r, 1.0).antenna_ids == std::vector<int>{0});
  CHECK(select_candidates(r, 0.5).sqw == std::vector<double>{1.0, 0.5});
  CHECK(select_candidates({}, 0.5).antenna_ids.empty());
}

TEST_CASE("serving set is the candidate prefix") {
  const auto r = receptions({1.0, 0.9, 0.8, 0.7, 0.6});
  const auto c = select_candidates(r, kMuFloor);
  CHECK(decide_serving_set(c, 0) == c.antenna_ids);
  CHECK(decide_serving_set(c, 3) == std::vector<int>{0, 1, 2});
  CHECK(decide_serving_set(c, 9) == c.antenna_ids);

  std::vector<PilotReception> tie{{7, 0, 1.0, 1.0}, {5, 0, 1.0, 0.5}, {3, 0, 1.0, 0.5}};
  CHECK(decide_serving_set(select_candidates(tie, kMuFloor), 2) == std::vector<int>{7, 3});
}

TEST_CASE("candidate sets nest as mu grows and ignore power scaling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> ids;
    std::vector<double> delays, powers, scaled;
    for (int a = 0; a < 12; ++a) {
      ids.push_back(a);
      delays.push_back(1.0);
      powers.push_back(u(rng));
      scaled.push_back(powers.back() * 1e3);
    }
    const auto r = receptions_from_powers(0, ids, delays, powers, 1e-300);
    const auto rs = receptions_from_powers(0, ids, delays, scaled, 1e-300);
    std::vector<int> prev;
    for (double mu : {0.05, 0.2, 0.5, 0.8, 1.0}) {
      const auto c = select_candidates(r, mu);
      CHECK(c.antenna_ids == select_candidates(rs, mu).antenna_ids);
      if (!prev.empty()) {
        std::vector<int> a = prev, b = c.antenna_ids;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(std::includes(a.begin(), a.end(), b.begin(), b.end()));
      }
      prev = c.antenna_ids;
    }
    CHECK(prev.size() == 1);
  }
}

TEST_CASE("DBM update inserts, refreshes and flags material moves") {
  const auto three = std::vector<PilotReception>{{2, 0, 10.0, 1.0}, {2, 1, 20.0, 0.5}, {2, 2, 30.0, 0.2},
                                                 {3, 0, 10.0, 1.0}};
  auto first = update_dbm(DelayBasedMap{2, {}}, three, 1);
  CHECK(first.map.entries.size() == 3);
  CHECK(first.major_updates == std::vector<int>{0, 1, 2});
  CHECK(first.map.entries.at(1) == DbmEntry{20.0, 0.5, 1});

  auto still = update_dbm(first.map, three, 2);
  CHECK(still.major_updates.empty());
  CHECK(still.map.entries.at(0).last_update_epoch == 2);

  const auto s = point_scenario({Point2(0, 0), Point2(100, 0)}, Point2(30, 40));
  auto dbm = update_dbm(DelayBasedMap{0, {}}, broadcast_pilot(s, 0), 0).map;
  CHECK(update_dbm(dbm, broadcast_pilot(s, 0), 1).major_updates.empty());
  auto moved = s;
  moved.uts[0].position = Point2(30, 90);
  CHECK(update_dbm(dbm, broadcast_pilot(moved, 0), 1).major_updates == std::vector<int>{0});
}

TEST_CASE("multilateration recovers the position") {
  const std::vector<RangeAnchor> anchors{{Point2(0, 0), 5.0},
                                         {Point2(10, 0), std::sqrt(65.0)},
                                         {Point2(0, 10), std::sqrt(45.0)}};
  const auto p = locate_ut(anchors);
  CHECK(p.x() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(p.y() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK((p - Point2(3, 4)).norm() < 1e-6);

  const std::vector<RangeAnchor> at_anchor{{Point2(2, 2), 0.0},
                                           {Point2(5, 2), 3.0},
                                           {Point2(2, 6), 4.0}};
  CHECK((locate_ut(at_anchor) - Point2(2, 2)).norm() < 1e-6);

  const std::vector<RangeAnchor> noisy{{Point2(0, 0), 5.1},
                                       {Point2(10, 0), std::sqrt(65.0)},
                                       {Point2(0, 10), std::sqrt(45.0)},
                                       {Point2(10, 10), std::sqrt(85.0)}};
  CHECK((locate_ut(noisy) - Point2(3, 4)).norm() < 0.2);
}

TEST_CASE("multilateration rejects bad anchor sets") {
  const std::vector<RangeAnchor> collinear{{Point2(0, 0), 1.0}, {Point2(1, 1), 1.0}, {Point2(3, 3), 1.0}};
  CHECK(errc_of([&] { locate_ut(collinear); }) == Errc::DegenerateGeometry);
  const std::vector<RangeAnchor> same{{Point2(1, 1), 1.0}, {Point2(1, 1), 1.0}, {Point2(1, 1), 1.0}};
  CHECK(errc_of([&] { locate_ut(same); }) == Errc::DegenerateGeometry);
  const std::vector<RangeAnchor> two{{Point2(0, 0), 1.0}, {Point2(1, 0), 1.0}};
  CHECK(errc_of([&] { locate_ut(two); }) == Errc::InsufficientAnchors);
}

TEST_CASE("UTs join the VN holding most of their serving antennas") {
  // Antennas 0-4 on VN1, 5-9 on VN2, 10-14 on VN3.
  std::vector<int> antenna_vn(15);
  for (int a = 0; a < 15; ++a) antenna_vn[a] = 1 + a / 5;
  const std::vector<ServingSet> serving{
      {0, {0, 1, 2}},            // unanimous VN1
      {1, {0, 1, 2, 5, 6}},      // 3/2 VN1/VN2
      {2, {3, 4, 10, 11}},       // 2/2 VN1/VN3
      {3, {7, 8, 9, 12}},        // VN2
  };
  const auto cells = form_virtual_cells(serving, antenna_vn);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].vc_id == 1);
  CHECK(cells[0].ut_ids == std::vector<int>{0, 1, 2});
  CHECK(cells[0].antenna_ids == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(cells[1].vn_id == 2);
  CHECK(cells[1].ut_ids == std::vector<int>{3});
  CHECK(cells[1].antenna_ids == std::vector<int>{7, 8, 9});

  const std::vector<ServingSet> empty{{0, {}}};
  CHECK(errc_of([&] { form_virtual_cells(empty, antenna_vn); }) == Errc::InvalidArgument);
}

TEST_CASE("isolation counts service that leaves the cell") {
  std::vector<int> antenna_vn(20);
  for (int a = 0; a < 20; ++a) antenna_vn[a] = a / 10;

  SUBCASE("separated cells do not leak") {
    const std::vector<ServingSet> serving{{0, {0, 1, 2}}, {1, {12, 13}}};
    const auto report = check_isolation(form_virtual_cells(serving, antenna_vn), serving);
    CHECK(report.leakage == 0.0);
    CHECK(report.pairs.size() == 1);
    CHECK(report.pairs[0].shared_antennas == 0);
  }
  SUBCASE("a single cell has no outside") {
    const std::vector<ServingSet> serving{{0, {0, 1}}, {1, {1, 2, 3}}};
    const auto report = check_isolation(form_virtual_cells(serving, antenna_vn), serving);
    CHECK(report.leakage == 0.0);
    CHECK(report.pairs.empty());
  }
  SUBCASE("one boundary UT in fifty serving links") {
    std::vector<ServingSet> serving;
    for (int u = 0; u < 5; ++u) serving.push_back({u, {0, 1, 2, 3, 4}});
    for (int u = 5; u < 9; ++u) serving.push_back({u, {10, 11, 12, 13, 14}});
    serving.push_back({9, {5, 6, 7, 8, 14}});
    const auto cells = form_virtual_cells(serving, antenna_vn);
    const auto report = check_isolation(cells, serving);
    CHECK(report.total_links == 50);
    CHECK(report.outside_links == 1);
    CHECK(report.leakage == doctest::Approx(1.0 / 50.0));
    CHECK(report.pairs[0].cross_service == 1);
  }
}

TEST_CASE("access procedure covers every UT and fills the maps") {
  ScenarioConfig c;
  c.antennas_per_pn = 40;
  c.ut_count = 30;
  c.mu = 0.5;
  c.seed = 4;
  const auto s = build_scenario(c);
  const auto access = run_access_procedure(s, 3);
  CHECK(access.uncovered_uts.empty());
  CHECK(access.serving.size() == 30);
  CHECK(access.dbms.size() == 160);
  std::size_t entries = 0;
  for (const auto& d : access.dbms) {
    entries += d.entries.size();
    for (const auto& [ut, e] : d.entries) CHECK(e.last_update_epoch == 3);
  }
  CHECK(entries == 160 * 30);
  int in_cells = 0;
  for (const auto& cell : access.cells) in_cells += static_cast<int>(cell.ut_ids.size());
  CHECK(in_cells == 30);
  CHECK(access.isolation.leakage >= 0.0);
  CHECK(access.isolation.leakage <= 1.0);
}
