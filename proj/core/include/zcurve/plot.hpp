#pragma once

#include <span>
#include <string>
#include <vector>

#include "zcurve/types.hpp"

namespace zcurve {

struct HistogramConfig {
  std::vector<double> mandatory{-1.96, -1.64, 0.0, 1.64, 1.96};
  double width = 0.25;
  double z_min = -6.0;
  double z_max = 6.0;

  void validate() const;
};

/// Bins are [edge_j, edge_j+1), the last one closed. Values outside the
/// range are only counted in `below` / `above`.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  /// count / (total * width): the in-range area is 1 without overflow.
  std::vector<double> heights;
  std::size_t below = 0;
  std::size_t above = 0;
  std::size_t total = 0;

  std::size_t bins() const noexcept { return counts.size(); }
  /// Bin holding z, or bins() when z is out of range.
  std::size_t bin_of(double z) const noexcept;
};

/// Each segment between consecutive mandatory edges and range bounds is cut
/// into ceil(length / width) equal bins; mandatory edges appear verbatim.
Histogram histogram_bins(std::span<const double> z, const HistogramConfig& cfg = {});
Histogram histogram_bins(const Dataset& data, const HistogramConfig& cfg = {});

struct PlotCurve {
  std::string name;
  std::vector<double> grid;
  DensityBand band;
  bool dashed = false;
  bool show_band = true;
};

struct PlotOptions {
  int width = 800;
  int height = 500;
  std::string title;
  std::string x_label = "z-statistic";
  std::string y_label = "Density";
  /// Dotted vertical lines at the mandatory histogram edges except 0.
  std::vector<double> thresholds{-1.96, -1.64, 1.64, 1.96};
};

/// Plot area in pixels and the affine data-to-pixel maps.
struct PlotFrame {
  double left = 0.0;
  double right = 0.0;
  double top = 0.0;
  double bottom = 0.0;
  double z_min = 0.0;
  double z_max = 1.0;
  double y_max = 1.0;

  double x(double z) const noexcept { return left + (z - z_min) / (z_max - z_min) * (right - left); }
  double y(double v) const noexcept { return bottom - v / y_max * (bottom - top); }
};

struct PlotOutput {
  std::string svg;
  /// z, hist_height, curve_<name>, band_lo_<name>, band_hi_<name>.
  std::string data_csv;
  /// left, right, count, height, area, flag (one row per bin plus overflow).
  std::string bins_csv;
  PlotFrame frame;
};

/// Throws ValidationError when the curves do not share one grid.
PlotOutput render_zcurve(const Histogram& hist, std::span<const PlotCurve> curves, const PlotOptions& options = {});

}  // namespace zcurve
