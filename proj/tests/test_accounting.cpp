#include "smmimo/accounting.hpp"
#include "smmimo/error.hpp"

#include <doctest.h>

#include <optional>

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

}  // namespace

TEST_CASE("SQU is the weighted sum of the metric vector") {
  CHECK(compute_squ({}, {}) == 0.0);
  const SquVector v{0.5, 2.0, 3.0, 1.0, 0.5};
  CHECK(compute_squ(v, {}) == 7.0);

  SquVector doubled = v;
  doubled.energy_cost = 4.0;
  CHECK(compute_squ(doubled, {}) - compute_squ(v, {}) == 2.0);

  const SquWeights only_distance{0.0, 0.0, 2.5, 0.0, 0.0};
  CHECK(compute_squ(v, only_distance) == 7.5);

  const SquVector half{0.25, 1.0, 1.5, 0.5, 0.25};
  CHECK(compute_squ(half, {}) == 0.5 * compute_squ(v, {}));

  SquVector more = v;
  more.signaling_cost = 1.5;
  CHECK(compute_squ(more, {}) > compute_squ(v, {}));
}

TEST_CASE("out-of-range inputs are rejected") {
  CHECK(validate(SquVector{}).empty());
  CHECK(validate(SquVector{1.5, 0, 0, 0, 0}).size() == 1);
  CHECK(validate(SquVector{0, -1, -1, 0, 2}).size() == 3);
  CHECK(errc_of([] { compute_squ({0, -1, 0, 0, 0}, {}); }) == Errc::InvalidArgument);
  CHECK(errc_of([] { compute_squ({}, {0, 0, 0, 0, 0}); }) == Errc::InvalidArgument);
  CHECK(errc_of([] { compute_squ({}, {-1, 1, 1, 1, 1}); }) == Errc::InvalidArgument);
}

TEST_CASE("flows are priced by their routed hop count") {
  const auto tree = complete_tree(2, 2);
  const std::vector<int> ut_vn{3};
  const std::vector<TrafficFlow> flows{{7, 0, FlowDestination::Internet, -1, 1.0}};
  const auto central = route_traffic(flows, tree, ut_vn, PgwMode::Centralized);
  const auto dist = route_traffic(flows, tree, ut_vn, PgwMode::Distributed);
  const SquWeights distance_only{0.0, 0.0, 1.0, 0.0, 0.0};
  CHECK(price_flow(flows[0], dist, distance_only) == 0.0);
  CHECK(price_flow(flows[0], central, distance_only) == 2.0);

  const FlowProfile profile{0.5, 3.0, 1.0, 2.0};
  CHECK(price_flow(flows[0], central, {}, profile) == 0.5 + 3.0 + 2.0 + 2.0 + 1.0);

  const TrafficFlow stray{8, 0, FlowDestination::Internet, -1, 1.0};
  CHECK(errc_of([&] { price_flow(stray, central, {}); }) == Errc::UnroutedFlow);
}
