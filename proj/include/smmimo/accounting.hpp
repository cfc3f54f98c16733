#ifndef SMMIMO_ACCOUNTING_HPP
#define SMMIMO_ACCOUNTING_HPP

#include "smmimo/vnode.hpp"

#include <string>
#include <vector>

namespace smmimo {

/// Service Quanta Unit metric vector.
struct SquVector {
  double data_urgency = 0.0;             ///< [0, 1]
  double energy_cost = 0.0;              ///< >= 0
  double distance_to_destination = 0.0; ///< hops, >= 0
  double signaling_cost = 0.0;           ///< message units, >= 0
  double content_quality = 0.0;          ///< [0, 1]
};

struct SquWeights {
  double data_urgency = 1.0;
  double energy_cost = 1.0;
  double distance_to_destination = 1.0;
  double signaling_cost = 1.0;
  double content_quality = 1.0;
};

/// Empty when valid, otherwise the violated ranges.
std::vector<std::string> validate(const SquVector& v);
std::vector<std::string> validate(const SquWeights& w);

/// Weighted sum of the metric vector. Throws InvalidArgument on invalid
/// input.
double compute_squ(const SquVector& vector, const SquWeights& weights);

/// Per-flow inputs that the route does not determine.
struct FlowProfile {
  double data_urgency = 0.0;
  double energy_cost = 0.0;
  double content_quality = 0.0;
  double signaling_per_flow = 1.0;  ///< setup messages charged to every flow
};

/// Prices a routed flow: the hop count comes from `routes`. Throws
/// UnroutedFlow when the flow is missing from the report.
double price_flow(const TrafficFlow& flow, const LoadReport& routes, const SquWeights& weights,
                  const FlowProfile& profile = {});

}  // namespace smmimo

#endif  // SMMIMO_ACCOUNTING_HPP
