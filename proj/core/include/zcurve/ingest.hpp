#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "zcurve/types.hpp"

namespace zcurve {

struct IngestConfig {
  std::string y_column = "y";
  std::string se_column = "se";
  char delimiter = ',';
  bool header = true;
};

/// Parses a delimited effect-size table held in memory. Without a header the
/// first two columns are (y, se). Throws ParseError on structural problems
/// and ValidationError on invalid values.
Dataset parse_table(std::string_view text, const IngestConfig& cfg = {}, std::string label = {});

/// Reads and parses a table file; the dataset label is the file stem.
Dataset read_table(const std::filesystem::path& path, const IngestConfig& cfg = {});

/// Serializes with a `y,se` header and round-trip precision.
std::string write_table(const Dataset& dataset);

/// Fraction of studies with |z| >= threshold.
double observed_discovery_rate(const Dataset& dataset, double threshold = 1.96);

}  // namespace zcurve
