#include "smmimo/accounting.hpp"

#include "smmimo/error.hpp"

#include <cmath>

namespace smmimo {
namespace {

bool level(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }
bool nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

std::vector<std::string> validate(const SquVector& v) {
  std::vector<std::string> out;
  if (!level(v.data_urgency)) out.emplace_back("data_urgency out of [0,1]");
  if (!nonneg(v.energy_cost)) out.emplace_back("energy_cost must be >= 0");
  if (!nonneg(v.distance_to_destination)) out.emplace_back("distance_to_destination must be >= 0");
  if (!nonneg(v.signaling_cost)) out.emplace_back("signaling_cost must be >= 0");
  if (!level(v.content_quality)) out.emplace_back("content_quality out of [0,1]");
  return out;
}

std::vector<std::string> validate(const SquWeights& w) {
  std::vector<std::string> out;
  const double all[] = {w.data_urgency, w.energy_cost, w.distance_to_destination,
                        w.signaling_cost, w.content_quality};
  bool any_positive = false;
  for (double x : all) {
    if (!nonneg(x)) out.emplace_back("weights must be finite and >= 0");
    any_positive = any_positive || x > 0.0;
  }
  if (!any_positive) out.emplace_back("at least one weight must be positive");
  return out;
}

double compute_squ(const SquVector& v, const SquWeights& w) {
  if (auto bad = validate(v); !bad.empty()) throw Error(Errc::InvalidArgument, bad.front());
  if (auto bad = validate(w); !bad.empty()) throw Error(Errc::InvalidArgument, bad.front());
  return w.data_urgency * v.data_urgency + w.energy_cost * v.energy_cost +
         w.distance_to_destination * v.distance_to_destination +
         w.signaling_cost * v.signaling_cost + w.content_quality * v.content_quality;
}

double price_flow(const TrafficFlow& flow, const LoadReport& routes, const SquWeights& weights,
                  const FlowProfile& profile) {
  const FlowRoute* route = routes.route_of(flow.flow_id);
  if (!route) throw Error(Errc::UnroutedFlow, "flow " + std::to_string(flow.flow_id));
  SquVector v;
  v.data_urgency = profile.data_urgency;
  v.energy_cost = profile.energy_cost;
  v.distance_to_destination = static_cast<double>(route->hops);
  v.signaling_cost = profile.signaling_per_flow;
  v.content_quality = profile.content_quality;
  return compute_squ(v, weights);
}

}  // namespace smmimo
