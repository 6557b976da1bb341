#include "zcurve/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace zcurve {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t row, const std::string& column) {
  const std::string where = "row " + std::to_string(row) + ", column \"" + column + "\"";
  if (field.empty()) throw ParseError("missing value at " + where);
  // from_chars rejects a leading '+'.
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("cannot parse number '" + std::string(field) + "' at " + where);
  }
  return value;
}

}  // namespace

Dataset parse_table(std::string_view text, const IngestConfig& cfg, std::string label) {
  if (cfg.y_column == cfg.se_column) throw ValidationError("y and se column names must differ");
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < text.size();) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(start, end - start));
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }

  std::size_t y_index = 0;
  std::size_t se_index = 1;
  std::size_t width = 2;
  std::size_t first_data = 0;
  if (cfg.header) {
    if (lines.empty()) throw ValidationError("empty dataset");
    const auto names = split(lines.front(), cfg.delimiter);
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (std::count(names.begin(), names.end(), names[i]) > 1) {
        throw ParseError("duplicate header column \"" + std::string(names[i]) + "\"");
      }
    }
    auto locate = [&](const std::string& name) {
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw ParseError("missing column \"" + name + "\"");
      return static_cast<std::size_t>(it - names.begin());
    };
    y_index = locate(cfg.y_column);
    se_index = locate(cfg.se_column);
    width = names.size();
    first_data = 1;
  }

  std::vector<RawRow> rows;
  rows.reserve(lines.size());
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    const std::size_t row = i - first_data + 1;
    const auto fields = split(lines[i], cfg.delimiter);
    if (fields.size() < std::max(y_index, se_index) + 1 || (cfg.header && fields.size() != width)) {
      throw ParseError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(width));
    }
    rows.push_back({parse_number(fields[y_index], row, cfg.y_column),
                    parse_number(fields[se_index], row, cfg.se_column)});
  }
  return validate_dataset(rows, std::move(label));
}

Dataset read_table(const std::filesystem::path& path, const IngestConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open data file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_table(buffer.str(), cfg, path.stem().string());
}

std::string write_table(const Dataset& dataset) {
  std::string out = "y,se\n";
  char buf[64];
  for (const auto& s : dataset.studies) {
    auto r = std::to_chars(buf, buf + sizeof buf, s.y());
    *r.ptr++ = ',';
    r = std::to_chars(r.ptr, buf + sizeof buf, s.se());
    out.append(buf, r.ptr);
    out.push_back('\n');
  }
  return out;
}

double observed_discovery_rate(const Dataset& dataset, double threshold) {
  validate_dataset(dataset);
  const auto hits = std::count_if(dataset.studies.begin(), dataset.studies.end(),
                                  [&](const Study& s) { return std::fabs(s.z()) >= threshold; });
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

}  // namespace zcurve
