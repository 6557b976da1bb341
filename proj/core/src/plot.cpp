#include "zcurve/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace zcurve {

namespace {

// SVG numbers: 6 significant digits, no locale.
std::string num(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// CSV numbers round-trip.
std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                   "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

void HistogramConfig::validate() const {
  std::vector<std::string> issues;
  if (!(width > 0.0) || !std::isfinite(width)) issues.emplace_back("bin width must be > 0");
  if (!(z_min < z_max) || !std::isfinite(z_min) || !std::isfinite(z_max)) {
    issues.emplace_back("histogram range needs z_min < z_max");
  }
  for (double e : mandatory) {
    if (!(e >= z_min && e <= z_max)) issues.push_back("mandatory edge " + num(e) + " outside the range");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::size_t Histogram::bin_of(double z) const noexcept {
  if (edges.size() < 2 || !(z >= edges.front()) || !(z <= edges.back())) return bins();
  if (z == edges.back()) return bins() - 1;
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), z) - edges.begin()) - 1;
}

Histogram histogram_bins(std::span<const double> z, const HistogramConfig& cfg) {
  cfg.validate();
  std::vector<double> anchors(cfg.mandatory.begin(), cfg.mandatory.end());
  anchors.push_back(cfg.z_min);
  anchors.push_back(cfg.z_max);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

  Histogram h;
  h.edges.push_back(anchors.front());
  for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
    const double a = anchors[s];
    const double b = anchors[s + 1];
    // The small slack keeps 1.0/0.25 from rounding up to 5 bins.
    const auto m = static_cast<int>(std::max(1.0, std::ceil((b - a) / cfg.width - 1e-9)));
    for (int j = 1; j < m; ++j) h.edges.push_back(a + (b - a) * j / m);
    h.edges.push_back(b);
  }
  h.counts.assign(h.edges.size() - 1, 0);
  for (double v : z) {
    ++h.total;
    const std::size_t b = h.bin_of(v);
    if (b < h.bins()) {
      ++h.counts[b];
    } else if (v < h.edges.front()) {
      ++h.below;
    } else {
      ++h.above;
    }
  }
  h.heights.resize(h.bins());
  for (std::size_t b = 0; b < h.bins(); ++b) {
    const double width = h.edges[b + 1] - h.edges[b];
    h.heights[b] = h.total == 0 ? 0.0 : static_cast<double>(h.counts[b]) / (static_cast<double>(h.total) * width);
  }
  return h;
}

Histogram histogram_bins(const Dataset& data, const HistogramConfig& cfg) {
  std::vector<double> z;
  z.reserve(data.size());
  for (const auto& s : data.studies) z.push_back(s.z());
  return histogram_bins(z, cfg);
}

PlotOutput render_zcurve(const Histogram& hist, std::span<const PlotCurve> curves, const PlotOptions& options) {
  if (hist.edges.size() < 2) throw ValidationError("histogram has no bins");
  for (const auto& c : curves) {
    if (c.grid != curves.front().grid) throw ValidationError("curve '" + c.name + "' uses a different grid");
    const std::size_t n = c.grid.size();
    if (n < 2 || c.band.mean.size() != n || c.band.lower.size() != n || c.band.upper.size() != n) {
      throw ValidationError("curve '" + c.name + "' has inconsistent lengths");
    }
  }

  PlotOutput out;
  PlotFrame& f = out.frame;
  f.left = 70.0;
  f.right = options.width - 170.0;
  f.top = options.title.empty() ? 20.0 : 45.0;
  f.bottom = options.height - 55.0;
  f.z_min = hist.edges.front();
  f.z_max = hist.edges.back();
  double top = 0.0;
  for (double v : hist.heights) top = std::max(top, v);
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      if (c.grid[i] < f.z_min || c.grid[i] > f.z_max) continue;
      top = std::max(top, c.show_band ? c.band.upper[i] : c.band.mean[i]);
    }
  }
  f.y_max = top > 0.0 ? top * 1.05 : 1.0;

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(options.width) +
       "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
       std::to_string(options.height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(options.width) + "\" height=\"" +
       std::to_string(options.height) + "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    s += "<text x=\"" + num(0.5 * (f.left + f.right)) + "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + escape(options.title) + "</text>\n";
  }

  s += "<g id=\"histogram\" fill=\"#d9d9d9\" stroke=\"#969696\" stroke-width=\"0.5\">\n";
  for (std::size_t b = 0; b < hist.bins(); ++b) {
    if (hist.counts[b] == 0) continue;
    const double x0 = f.x(hist.edges[b]);
    const double x1 = f.x(hist.edges[b + 1]);
    const double y = f.y(hist.heights[b]);
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
         num(f.bottom - y) + "\"/>\n";
  }
  s += "</g>\n";

  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    if (!c.show_band) continue;
    const std::string colour = palette[k % std::size(palette)];
    std::string points;
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      points += num(f.x(c.grid[i])) + "," + num(f.y(c.band.upper[i])) + " ";
    }
    for (std::size_t i = c.grid.size(); i-- > 0;) {
      points += num(f.x(c.grid[i])) + "," + num(f.y(c.band.lower[i])) + " ";
    }
    points.pop_back();
    s += "<polygon class=\"band\" fill=\"" + colour + "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"" + points +
         "\"/>\n";
  }
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const std::string colour = palette[k % std::size(palette)];
    std::string points;
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      if (!points.empty()) points += ' ';
      points += num(f.x(c.grid[i])) + "," + num(f.y(c.band.mean[i]));
    }
    s += "<polyline class=\"curve\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"2\"";
    if (c.dashed) s += " stroke-dasharray=\"6,4\"";
    s += " points=\"" + points + "\"/>\n";
  }

  s += "<g id=\"thresholds\" stroke=\"#444444\" stroke-width=\"1\" stroke-dasharray=\"2,3\">\n";
  for (double t : options.thresholds) {
    if (t < f.z_min || t > f.z_max) continue;
    s += "<line x1=\"" + num(f.x(t)) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.x(t)) + "\" y2=\"" +
         num(f.bottom) + "\"/>\n";
  }
  s += "</g>\n";

  // Axes and ticks.
  s += "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.bottom) + "\" x2=\"" + num(f.right) + "\" y2=\"" +
       num(f.bottom) + "\"/>\n";
  s += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) + "\" y2=\"" + num(f.bottom) +
       "\"/>\n";
  const double xstep = nice_step(f.z_max - f.z_min, 12);
  for (double t = std::ceil(f.z_min / xstep) * xstep; t <= f.z_max + 1e-9; t += xstep) {
    const double x = f.x(t);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(f.bottom) + "\" x2=\"" + num(x) + "\" y2=\"" + num(f.bottom + 5) +
         "\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(f.bottom + 18) + "\" text-anchor=\"middle\" stroke=\"none\">" +
         num(std::round(t / xstep) * xstep) + "</text>\n";
  }
  const double ystep = nice_step(f.y_max, 5);
  for (double v = 0.0; v <= f.y_max + 1e-12; v += ystep) {
    const double y = f.y(v);
    s += "<line x1=\"" + num(f.left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(f.left) + "\" y2=\"" + num(y) +
         "\"/>\n";
    s += "<text x=\"" + num(f.left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\" stroke=\"none\">" +
         num(std::round(v / ystep) * ystep) + "</text>\n";
  }
  s += "<text x=\"" + num(0.5 * (f.left + f.right)) + "\" y=\"" + num(f.bottom + 40) +
       "\" text-anchor=\"middle\" stroke=\"none\" font-size=\"13\">" + escape(options.x_label) + "</text>\n";
  s += "<text x=\"18\" y=\"" + num(0.5 * (f.top + f.bottom)) + "\" text-anchor=\"middle\" stroke=\"none\" "
       "font-size=\"13\" transform=\"rotate(-90 18 " + num(0.5 * (f.top + f.bottom)) + ")\">" +
       escape(options.y_label) + "</text>\n";
  s += "</g>\n";

  s += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const double y = f.top + 10.0 + 20.0 * static_cast<double>(k);
    const std::string colour = palette[k % std::size(palette)];
    s += "<line class=\"legend-entry\" x1=\"" + num(f.right + 15) + "\" y1=\"" + num(y) + "\" x2=\"" +
         num(f.right + 45) + "\" y2=\"" + num(y) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"";
    if (curves[k].dashed) s += " stroke-dasharray=\"6,4\"";
    s += "/>\n";
    s += "<text x=\"" + num(f.right + 52) + "\" y=\"" + num(y + 4) + "\">" + escape(curves[k].name) + "</text>\n";
  }
  s += "</g>\n";
  s += "</svg>\n";
  out.svg = std::move(s);

  // Plot data on the curve grid, or at bin midpoints without curves.
  std::string d = "z,hist_height";
  for (const auto& c : curves) d += ",curve_" + c.name + ",band_lo_" + c.name + ",band_hi_" + c.name;
  d += '\n';
  std::vector<double> zs;
  if (!curves.empty()) {
    zs = curves.front().grid;
  } else {
    for (std::size_t b = 0; b < hist.bins(); ++b) zs.push_back(0.5 * (hist.edges[b] + hist.edges[b + 1]));
  }
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const std::size_t b = hist.bin_of(zs[i]);
    d += exact(zs[i]) + "," + exact(b < hist.bins() ? hist.heights[b] : 0.0);
    for (const auto& c : curves) {
      d += "," + exact(c.band.mean[i]) + "," + exact(c.band.lower[i]) + "," + exact(c.band.upper[i]);
    }
    d += '\n';
  }
  out.data_csv = std::move(d);

  const double total = static_cast<double>(std::max<std::size_t>(hist.total, 1));
  std::string bins = "left,right,count,height,area,flag\n";
  if (hist.below > 0) {
    bins += "-inf," + exact(hist.edges.front()) + "," + std::to_string(hist.below) + ",," +
            exact(static_cast<double>(hist.below) / total) + ",underflow\n";
  }
  for (std::size_t b = 0; b < hist.bins(); ++b) {
    bins += exact(hist.edges[b]) + "," + exact(hist.edges[b + 1]) + "," + std::to_string(hist.counts[b]) + "," +
            exact(hist.heights[b]) + "," + exact(static_cast<double>(hist.counts[b]) / total) + ",\n";
  }
  if (hist.above > 0) {
    bins += exact(hist.edges.back()) + ",inf," + std::to_string(hist.above) + ",," +
            exact(static_cast<double>(hist.above) / total) + ",overflow\n";
  }
  out.bins_csv = std::move(bins);
  return out;
}

}  // namespace zcurve
