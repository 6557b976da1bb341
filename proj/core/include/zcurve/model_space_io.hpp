#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "zcurve/evidence.hpp"
#include "zcurve/types.hpp"

namespace zcurve {

/// Infinite truncation bounds are omitted from the JSON form.
nlohmann::json prior_to_json(const Prior& prior);
Prior prior_from_json(const nlohmann::json& j);

nlohmann::json spec_to_json(const ModelSpec& spec);
/// Throws ParseError on malformed JSON structure and ValidationError on an
/// inconsistent spec.
ModelSpec spec_from_json(const nlohmann::json& j);

/// {"models": [...]}.
nlohmann::json model_space_to_json(const ModelSpace& space);
ModelSpace model_space_from_json(const nlohmann::json& j);

/// Reads and validates a model-space file. Missing files raise Error.
ModelSpace read_model_space(const std::filesystem::path& path);
std::string write_model_space(const ModelSpace& space);

}  // namespace zcurve
