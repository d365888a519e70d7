// config.hpp: scenario configuration as a JSON document whose keys mirror
// ScenarioConfig field names exactly. Unknown or missing keys are rejected
// with their full field path.

#pragma once

#include <string>

#include "loadshare/sim.hpp"

namespace loadshare {

// Parses a JSON document; throws ConfigError naming the offending field.
ScenarioConfig parse_config(const std::string& json_text);

// Same, reading from a file; errors are prefixed with the path.
ScenarioConfig load_config(const std::string& path);

}  // namespace loadshare
