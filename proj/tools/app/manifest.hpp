#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "config.hpp"

namespace cgns::app {

/// Keys: config, seed, files (filled by the caller), created_at, version,
/// config_hash, command, components.
nlohmann::json manifest_base(const RunConfig& cfg, const std::string& command);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// UTC, ISO 8601 with seconds.
std::string utc_timestamp();

}  // namespace cgns::app
