#ifndef SMMIMO_DBM_HPP
#define SMMIMO_DBM_HPP

#include "smmimo/topology.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace smmimo {

inline constexpr double kMinRangeM = 1.0;   ///< near-field guard on pathloss distance
inline constexpr double kRefRangeM = 1.0;   ///< pathloss reference distance
inline constexpr double kMuFloor = 1e-12;   ///< smallest usable acceptance ratio

/// Unit-power received level at distance `d`: (max(d, d_min) / d_ref)^-gamma.
double pathloss_gain(double distance_m, double gamma);

/// Acceptance rule shared by candidate selection and the capacity mask:
/// an antenna qualifies when its power reaches mu times the strongest one.
inline bool meets_acceptance(double power, double max_power, double mu) {
  return power >= mu * max_power;
}

struct PilotReception {
  int antenna_id = 0;
  int ut_id = 0;
  double delay_distance = 0.0;  ///< meters
  double sqw = 0.0;             ///< received power / strongest received power
  bool operator==(const PilotReception&) const = default;
};

/// Normalizes raw received powers into receptions, drops those below the
/// noise floor and sorts by (sqw desc, antenna id asc). Throws NoCoverage if
/// nothing remains.
std::vector<PilotReception> receptions_from_powers(int ut_id, std::span<const int> antenna_ids,
                                                   std::span<const double> delay_distances,
                                                   std::span<const double> powers,
                                                   double noise_floor);

struct PilotOptions {
  double range_noise_sigma_m = 0.0;  ///< Gaussian timestamp noise, off by default
  std::uint64_t noise_seed = 0;
  std::uint64_t epoch = 0;
};

/// Every antenna's view of one UT's pilot.
std::vector<PilotReception> broadcast_pilot(const Scenario& scenario, int ut_id,
                                            const PilotOptions& options = {});

struct CandidateSet {
  int ut_id = 0;
  double mu = 1.0;
  std::vector<int> antenna_ids;  ///< sqw desc, antenna id asc
  std::vector<double> sqw;       ///< parallel to antenna_ids
};

CandidateSet select_candidates(std::span<const PilotReception> receptions, double mu);

/// Top `serve_quota` candidates in candidate order; 0 keeps them all.
std::vector<int> decide_serving_set(const CandidateSet& candidates, int serve_quota);

struct DbmEntry {
  double delay_distance = 0.0;
  double sqw = 0.0;
  std::uint64_t last_update_epoch = 0;
  bool operator==(const DbmEntry&) const = default;
};

struct DelayBasedMap {
  int antenna_id = 0;
  std::map<int, DbmEntry> entries;  ///< ut id -> entry
  bool operator==(const DelayBasedMap&) const = default;
};

inline constexpr double kMajorDelayChangeM = 1.0;
inline constexpr double kMajorSqwChange = 0.01;

struct DbmUpdate {
  DelayBasedMap map;
  std::vector<int> major_updates;  ///< UT ids whose entry is new or moved materially
};

/// Upserts the receptions addressed to this antenna; others are ignored.
DbmUpdate update_dbm(DelayBasedMap dbm, std::span<const PilotReception> receptions,
                     std::uint64_t epoch);

struct RangeAnchor {
  Point2 position = Point2::Zero();
  double distance = 0.0;
};

/// Multilateration: linear least squares from range differences, refined by
/// damped Gauss-Newton. Throws InsufficientAnchors (< 3) or
/// DegenerateGeometry (collinear anchors).
Point2 locate_ut(std::span<const RangeAnchor> anchors);

struct ServingSet {
  int ut_id = 0;
  std::vector<int> antenna_ids;
};

struct VirtualCell {
  int vc_id = 0;
  int vn_id = 0;
  std::vector<int> antenna_ids;  ///< sorted
  std::vector<int> ut_ids;       ///< sorted
};

/// Each UT joins the VN owning most of its serving antennas (lowest VN id on
/// ties). One cell per VN that received at least one UT, vc_id == vn_id.
/// `antenna_vn[a]` is the VN owning antenna a.
std::vector<VirtualCell> form_virtual_cells(std::span<const ServingSet> serving,
                                            std::span<const int> antenna_vn);

struct CellPairInterference {
  int vc_a = 0;
  int vc_b = 0;
  int shared_antennas = 0;
  int cross_service = 0;  ///< serving links from UTs of one cell into the other's antennas
};

struct IsolationReport {
  std::vector<CellPairInterference> pairs;  ///< vc_a < vc_b
  int outside_links = 0;
  int total_links = 0;
  double leakage = 0.0;  ///< outside_links / total_links
};

IsolationReport check_isolation(std::span<const VirtualCell> cells,
                                std::span<const ServingSet> serving);

/// The complete access procedure for every UT: pilot, candidate selection,
/// serving decision, DBM update, cell formation and isolation check.
struct AccessResult {
  std::vector<DelayBasedMap> dbms;  ///< indexed by antenna id
  std::vector<CandidateSet> candidates;
  std::vector<ServingSet> serving;
  std::vector<int> uncovered_uts;
  std::vector<VirtualCell> cells;
  IsolationReport isolation;
};

/// VN of each antenna when every PN hosts its own VN.
std::vector<int> antenna_vn_by_pn(const Scenario& scenario);

AccessResult run_access_procedure(const Scenario& scenario, std::uint64_t epoch = 0);

}  // namespace smmimo

#endif  // SMMIMO_DBM_HPP
