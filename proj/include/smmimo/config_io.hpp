#ifndef SMMIMO_CONFIG_IO_HPP
#define SMMIMO_CONFIG_IO_HPP

#include "smmimo/topology.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace smmimo {

struct LoadedConfig {
  ScenarioConfig config;
  bool seed_present = false;
};

/// Strict decode: unknown keys and wrongly typed values raise
/// Error(InvalidConfig). Missing keys keep their defaults.
LoadedConfig config_from_json(const nlohmann::json& doc);
LoadedConfig load_config(const std::filesystem::path& path);

/// Every field materialized, suitable for a run manifest.
nlohmann::json config_to_json(const ScenarioConfig& config);

}  // namespace smmimo

#endif  // SMMIMO_CONFIG_IO_HPP
