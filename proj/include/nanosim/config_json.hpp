#pragma once

#include "nanosim/pipeline.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace nanosim {

nlohmann::json config_to_json(const GenerationConfig& cfg);

/// Overlays `doc` on the defaults. Unknown keys and type mismatches raise
/// ConfigError naming the key; the result is validated before returning.
GenerationConfig config_from_json(const nlohmann::json& doc);
GenerationConfig config_from_json(const nlohmann::json& doc, GenerationConfig base);

/// Dotted `section.key` pairs in a stable order, values rendered as JSON scalars.
std::vector<std::pair<std::string, std::string>> flatten_config(const GenerationConfig& cfg);

}  // namespace nanosim
