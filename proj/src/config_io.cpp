#include "smmimo/config_io.hpp"

#include "smmimo/error.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace smmimo {
namespace {

using nlohmann::json;
using Setter = std::function<void(ScenarioConfig&, const json&)>;

template <typename T>
T read_as(const json& value, const std::string& key) {
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!value.is_number_integer()) throw Error(Errc::InvalidConfig, key + " must be an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) throw Error(Errc::InvalidConfig, key + " must be a number");
    }
    return value.get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, key + ": " + e.what());
  }
}

template <typename T>
Setter field(T ScenarioConfig::*member, std::string key) {
  return [member, key](ScenarioConfig& c, const json& v) { c.*member = read_as<T>(v, key); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["pn_count"] = field(&ScenarioConfig::pn_count, "pn_count");
    t["antennas_per_pn"] = field(&ScenarioConfig::antennas_per_pn, "antennas_per_pn");
    t["ut_count"] = field(&ScenarioConfig::ut_count, "ut_count");
    t["region_extent_m"] = field(&ScenarioConfig::region_extent_m, "region_extent_m");
    t["pn_aperture_m"] = field(&ScenarioConfig::pn_aperture_m, "pn_aperture_m");
    t["radio_range_m"] = field(&ScenarioConfig::radio_range_m, "radio_range_m");
    t["pathloss_exponent"] = field(&ScenarioConfig::pathloss_exponent, "pathloss_exponent");
    t["noise_floor"] = field(&ScenarioConfig::noise_floor, "noise_floor");
    t["mu"] = field(&ScenarioConfig::mu, "mu");
    t["alpha_list"] = field(&ScenarioConfig::alpha_list, "alpha_list");
    t["snr_grid_db"] = field(&ScenarioConfig::snr_grid_db, "snr_grid_db");
    t["mc_trials"] = field(&ScenarioConfig::mc_trials, "mc_trials");
    t["internet_fraction"] = field(&ScenarioConfig::internet_fraction, "internet_fraction");
    t["seed"] = [](ScenarioConfig& c, const json& v) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw Error(Errc::InvalidConfig, "seed must be an unsigned 64-bit integer");
      }
      c.seed = v.get<std::uint64_t>();
    };
    t["serve_quota"] = field(&ScenarioConfig::serve_quota, "serve_quota");
    t["channel_model"] = [](ScenarioConfig& c, const json& v) {
      const auto s = read_as<std::string>(v, "channel_model");
      if (s == "iid") c.channel_model = ChannelModel::Iid;
      else if (s == "pathloss") c.channel_model = ChannelModel::Pathloss;
      else throw Error(Errc::InvalidConfig, "channel_model must be \"iid\" or \"pathloss\"");
    };
    t["blocks_per_pn"] = field(&ScenarioConfig::blocks_per_pn, "blocks_per_pn");
    t["compute_units_per_block"] =
        field(&ScenarioConfig::compute_units_per_block, "compute_units_per_block");
    t["storage_units_per_block"] =
        field(&ScenarioConfig::storage_units_per_block, "storage_units_per_block");
    t["mask_mode"] = [](ScenarioConfig& c, const json& v) {
      const auto s = read_as<std::string>(v, "mask_mode");
      if (s == "full") c.mask_mode = MaskMode::Full;
      else if (s == "mu") c.mask_mode = MaskMode::Mu;
      else throw Error(Errc::InvalidConfig, "mask_mode must be \"full\" or \"mu\"");
    };
    t["k_interferers"] = [](ScenarioConfig& c, const json& v) {
      if (v.is_null()) c.k_interferers.reset();
      else c.k_interferers = read_as<int>(v, "k_interferers");
    };
    t["range_noise_sigma_m"] = field(&ScenarioConfig::range_noise_sigma_m, "range_noise_sigma_m");
    return t;
  }();
  return table;
}

}  // namespace

LoadedConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::InvalidConfig, "config root must be a JSON object");
  LoadedConfig out;
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    auto it = table.find(key);
    if (it == table.end()) throw Error(Errc::InvalidConfig, "unknown field \"" + key + "\"");
    it->second(out.config, value);
  }
  out.seed_present = doc.contains("seed");
  return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, "cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["pn_count"] = c.pn_count;
  j["antennas_per_pn"] = c.antennas_per_pn;
  j["ut_count"] = c.ut_count;
  j["region_extent_m"] = c.region_extent_m;
  j["pn_aperture_m"] = c.pn_aperture_m;
  j["radio_range_m"] = c.radio_range_m;
  j["pathloss_exponent"] = c.pathloss_exponent;
  j["noise_floor"] = c.noise_floor;
  j["mu"] = c.mu;
  j["alpha_list"] = c.alpha_list;
  j["snr_grid_db"] = c.snr_grid_db;
  j["mc_trials"] = c.mc_trials;
  j["internet_fraction"] = c.internet_fraction;
  j["seed"] = c.seed;
  j["serve_quota"] = c.serve_quota;
  j["channel_model"] = c.channel_model == ChannelModel::Iid ? "iid" : "pathloss";
  j["blocks_per_pn"] = c.blocks_per_pn;
  j["compute_units_per_block"] = c.compute_units_per_block;
  j["storage_units_per_block"] = c.storage_units_per_block;
  j["mask_mode"] = c.mask_mode == MaskMode::Full ? "full" : "mu";
  j["k_interferers"] = c.k_interferers ? json(*c.k_interferers) : json(nullptr);
  j["range_noise_sigma_m"] = c.range_noise_sigma_m;
  return j;
}

}  // namespace smmimo
