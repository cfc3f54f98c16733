#include "smmimo/topology.hpp"

#include "smmimo/error.hpp"
#include "smmimo/random.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace smmimo {
namespace {

enum Stream : std::uint64_t { kPnLayout = 1, kAntennaOffsets = 2, kUtLayout = 3 };

bool in_unit_interval(double x) { return x > 0.0 && x <= 1.0; }

std::vector<Point2> seeded_pn_positions(const ScenarioConfig& config) {
  CounterRng rng(config.seed, kPnLayout);
  const double lo = config.pn_aperture_m;
  const double hi = config.region_extent_m - config.pn_aperture_m;
  std::vector<Point2> positions;
  positions.reserve(config.pn_count);
  for (int i = 0; i < config.pn_count; ++i) {
    const double x = rng.uniform(lo, hi);
    const double y = rng.uniform(lo, hi);
    positions.emplace_back(x, y);
  }
  return positions;
}

std::vector<CcmBlock> make_blocks(const ScenarioConfig& config) {
  const int n = config.blocks_per_pn;
  std::vector<CcmBlock> blocks(n);
  for (int b = 0; b < n; ++b) {
    blocks[b].id = b;
    blocks[b].radio_count = config.antennas_per_pn / n + (b < config.antennas_per_pn % n ? 1 : 0);
    blocks[b].compute_units = config.compute_units_per_block;
    blocks[b].storage_units = config.storage_units_per_block;
  }
  return blocks;
}

}  // namespace

int PhysicalNode::total_antennas() const {
  return std::accumulate(blocks.begin(), blocks.end(), 0,
                         [](int acc, const CcmBlock& b) { return acc + b.radio_count; });
}

int PhysicalNode::total_compute_units() const {
  return std::accumulate(blocks.begin(), blocks.end(), 0,
                         [](int acc, const CcmBlock& b) { return acc + b.compute_units; });
}

int PhysicalNode::total_storage_units() const {
  return std::accumulate(blocks.begin(), blocks.end(), 0,
                         [](int acc, const CcmBlock& b) { return acc + b.storage_units; });
}

std::vector<std::string> validate_config(const ScenarioConfig& c) {
  std::vector<std::string> report;
  auto require = [&report](bool ok, const char* message) {
    if (!ok) report.emplace_back(message);
  };
  require(c.pn_count >= 1, "pn_count must be >= 1");
  require(c.antennas_per_pn >= 1, "antennas_per_pn must be >= 1");
  require(c.ut_count >= 0, "ut_count must be >= 0");
  require(c.region_extent_m > 0.0 && std::isfinite(c.region_extent_m),
          "region_extent_m must be positive");
  require(c.pn_aperture_m >= 0.0 && std::isfinite(c.pn_aperture_m),
          "pn_aperture_m must be nonnegative");
  require(c.region_extent_m > 2.0 * c.pn_aperture_m,
          "region_extent_m must exceed twice pn_aperture_m");
  require(c.radio_range_m > 0.0, "radio_range_m must be positive");
  require(c.pathloss_exponent > 0.0 && std::isfinite(c.pathloss_exponent),
          "pathloss_exponent must be positive");
  require(c.noise_floor > 0.0 && std::isfinite(c.noise_floor), "noise_floor must be positive");
  require(in_unit_interval(c.mu), "mu out of (0,1]");
  require(!c.alpha_list.empty(), "alpha_list must not be empty");
  bool alpha_ok = true;
  for (double a : c.alpha_list) alpha_ok = alpha_ok && in_unit_interval(a);
  require(alpha_ok, "alpha out of (0,1]");
  require(!c.snr_grid_db.empty(), "snr_grid_db must not be empty");
  bool snr_ok = true;
  for (double s : c.snr_grid_db) snr_ok = snr_ok && std::isfinite(s);
  require(snr_ok, "snr_grid_db entries must be finite");
  require(c.mc_trials >= 2, "mc_trials must be >= 2");
  require(c.internet_fraction >= 0.0 && c.internet_fraction <= 1.0,
          "internet_fraction out of [0,1]");
  require(c.serve_quota >= 0, "serve_quota must be >= 0");
  require(c.blocks_per_pn >= 1, "blocks_per_pn must be >= 1");
  require(c.blocks_per_pn <= c.antennas_per_pn, "blocks_per_pn must not exceed antennas_per_pn");
  require(c.compute_units_per_block >= 0, "compute_units_per_block must be >= 0");
  require(c.storage_units_per_block >= 0, "storage_units_per_block must be >= 0");
  require(!c.k_interferers || *c.k_interferers >= 0, "k_interferers must be >= 0");
  require(c.range_noise_sigma_m >= 0.0, "range_noise_sigma_m must be >= 0");
  return report;
}

std::pair<int, int> Scenario::antenna_range(int pn_id) const {
  int begin = 0;
  for (int p = 0; p < pn_id; ++p) begin += nodes[p].total_antennas();
  return {begin, begin + nodes[pn_id].total_antennas()};
}

Scenario build_scenario(const ScenarioConfig& config) {
  auto report = validate_config(config);
  if (!report.empty()) {
    std::string joined;
    for (const auto& line : report) joined += (joined.empty() ? "" : "; ") + line;
    throw Error(Errc::InvalidConfig, joined);
  }
  return build_scenario(config, seeded_pn_positions(config));
}

Scenario build_scenario(const ScenarioConfig& config, const std::vector<Point2>& pn_positions) {
  if (static_cast<int>(pn_positions.size()) != config.pn_count) {
    throw Error(Errc::InvalidArgument, "pn_positions size differs from pn_count");
  }
  Scenario s;
  s.config = config;
  s.nodes.reserve(config.pn_count);
  s.antennas.reserve(static_cast<std::size_t>(config.pn_count) * config.antennas_per_pn);

  CounterRng offsets(config.seed, kAntennaOffsets);
  for (int p = 0; p < config.pn_count; ++p) {
    PhysicalNode pn;
    pn.id = p;
    pn.position = pn_positions[p];
    pn.blocks = make_blocks(config);
    pn.radio_range_m = config.radio_range_m;
    for (const auto& block : pn.blocks) {
      for (int r = 0; r < block.radio_count; ++r) {
        // Uniform over the aperture disc.
        const double radius = config.pn_aperture_m * std::sqrt(offsets.uniform());
        const double angle = 2.0 * std::numbers::pi * offsets.uniform();
        Antenna a;
        a.id = static_cast<int>(s.antennas.size());
        a.pn_id = p;
        a.block_id = block.id;
        a.position = pn.position + radius * Point2(std::cos(angle), std::sin(angle));
        s.antennas.push_back(a);
      }
    }
    s.nodes.push_back(std::move(pn));
  }

  CounterRng ut_rng(config.seed, kUtLayout);
  s.uts.reserve(config.ut_count);
  for (int u = 0; u < config.ut_count; ++u) {
    const double x = ut_rng.uniform(0.0, config.region_extent_m);
    const double y = ut_rng.uniform(0.0, config.region_extent_m);
    s.uts.push_back({u, Point2(x, y), 1.0});
  }
  return s;
}

}  // namespace smmimo
