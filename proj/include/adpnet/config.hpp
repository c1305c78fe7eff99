#pragma once

#include <string>

#include <json.hpp>

#include "adpnet/tasks.hpp"

namespace adpnet {

/// Builds a TrainConfig from a JSON tree. Missing fields keep their defaults,
/// unknown fields are rejected, and the result is validated. Errors are
/// ConfigurationError with the dotted field path in the message.
TrainConfig config_from_json(const nlohmann::json& j);

/// TOML source text. Syntax errors report "line:column"; field errors report
/// the field path and the line it was declared on.
TrainConfig parse_toml_config(const std::string& text, const std::string& source_name = "config");

/// JSON source text; syntax errors carry the line and column.
TrainConfig parse_json_config(const std::string& text, const std::string& source_name = "config");

/// Reads a .toml or .json file (chosen by extension, TOML otherwise).
TrainConfig load_config(const std::string& path);

}  // namespace adpnet
