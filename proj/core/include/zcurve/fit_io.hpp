#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "zcurve/fit.hpp"

namespace zcurve {

nlohmann::json fit_to_json(const FitResult& fit);
/// Throws Error naming the found version when schema_version differs from
/// FitResult::schema_version.
FitResult fit_from_json(const nlohmann::json& j);

std::string write_fit(const FitResult& fit);
FitResult read_fit(const std::filesystem::path& path);

}  // namespace zcurve
