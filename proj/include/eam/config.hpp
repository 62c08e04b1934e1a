#pragma once

#include "eam/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace eam {

/// A parsed run-config document plus the directory relative paths resolve against.
struct ConfigDocument {
  nlohmann::json doc = nlohmann::json::object();
  std::filesystem::path base_dir;
};

ConfigDocument load_config(const std::filesystem::path &path);
ConfigDocument parse_config(const std::string &text, std::filesystem::path base_dir = {});

/// `section.key=value` (array elements by index: `bank.capacitors.1.c_uf=100`).
/// The value is read as JSON when it parses, otherwise as a bare string.
void apply_override(ConfigDocument &config, const std::string &assignment);

/// Builds and validates a SimConfig. Unknown keys and bad values throw Config naming the key.
SimConfig build_sim_config(const ConfigDocument &config);

/// Default bank: 33 uF for light tasks and the MCU, 220 uF for actuation.
std::vector<CapacitorParams> default_capacitors(double dt);

} // namespace eam
