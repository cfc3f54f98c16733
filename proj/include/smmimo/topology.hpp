#ifndef SMMIMO_TOPOLOGY_HPP
#define SMMIMO_TOPOLOGY_HPP

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smmimo {

using Point2 = Eigen::Vector2d;

/// Building block of a physical node: a slice of radios plus abstract
/// compute and storage capacity, with its own POST outcome.
struct CcmBlock {
  int id = 0;
  int radio_count = 1;
  bool post_passed = true;
  int compute_units = 0;
  int storage_units = 0;
};

struct PhysicalNode {
  int id = 0;
  Point2 position = Point2::Zero();
  std::vector<CcmBlock> blocks;
  double radio_range_m = 0.0;

  int total_antennas() const;
  int total_compute_units() const;
  int total_storage_units() const;
};

struct Antenna {
  int id = 0;
  int pn_id = 0;
  int block_id = 0;
  Point2 position = Point2::Zero();
};

struct UserTerminal {
  int id = 0;
  Point2 position = Point2::Zero();
  double tx_power = 1.0;
};

/// Inter-cell interference factor at which the 1000 x 100 reference cell
/// reaches 900 bps/Hz at 10 dB (k_interferers 100, 200 trials, seed 1), as
/// found by `smmimo calibrate`.
inline constexpr double kCalibratedAlpha = 0.017579421866685152;

enum class ChannelModel { Iid, Pathloss };
enum class MaskMode { Full, Mu };

/// Full run configuration. Field names are also the JSON keys.
struct ScenarioConfig {
  int pn_count = 4;
  int antennas_per_pn = 1000;
  int ut_count = 400;
  double region_extent_m = 1000.0;
  double pn_aperture_m = 5.0;
  double radio_range_m = 800.0;
  double pathloss_exponent = 3.8;
  double noise_floor = 1e-13;
  double mu = 1.0;
  std::vector<double> alpha_list = {1.0, 0.5, 0.1, kCalibratedAlpha};
  std::vector<double> snr_grid_db = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  int mc_trials = 200;
  double internet_fraction = 0.75;
  std::uint64_t seed = 1;
  int serve_quota = 0;
  ChannelModel channel_model = ChannelModel::Iid;

  // Extensions beyond the core scenario description.
  int blocks_per_pn = 4;
  int compute_units_per_block = 8;
  int storage_units_per_block = 8;
  MaskMode mask_mode = MaskMode::Full;
  std::optional<int> k_interferers;  ///< unset: equal to the UTs per cell
  double range_noise_sigma_m = 0.0;

  /// UTs per virtual cell in the symmetric layout (ut_count / pn_count).
  int uts_per_cell() const { return pn_count > 0 ? ut_count / pn_count : 0; }
  int interferers() const { return k_interferers.value_or(uts_per_cell()); }
};

/// Empty when the config is valid; otherwise one line per violated rule.
std::vector<std::string> validate_config(const ScenarioConfig& config);

struct Scenario {
  ScenarioConfig config;
  std::vector<PhysicalNode> nodes;
  std::vector<Antenna> antennas;  ///< indexed by antenna id
  std::vector<UserTerminal> uts;  ///< indexed by UT id

  /// Contiguous range of antenna ids owned by a PN.
  std::pair<int, int> antenna_range(int pn_id) const;
};

/// Seeded placement of PNs, antennas and UTs. Throws Error(InvalidConfig)
/// listing every violation when the config does not validate.
Scenario build_scenario(const ScenarioConfig& config);

/// Replaces the seeded PN layout with explicit positions (handy for
/// hand-built topologies); antennas are re-derived around the new centers.
Scenario build_scenario(const ScenarioConfig& config, const std::vector<Point2>& pn_positions);

}  // namespace smmimo

#endif  // SMMIMO_TOPOLOGY_HPP
