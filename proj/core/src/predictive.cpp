#include "zcurve/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zcurve/densities.hpp"
#include "zcurve/ingest.hpp"
#include "zcurve/normal.hpp"
#include "zcurve/parallel.hpp"
#include "zcurve/quadrature.hpp"

namespace zcurve {

namespace {

// Per-study constants of one draw on the z scale.
struct StudyTerms {
  std::vector<double> mean;      // m_i / se_i
  std::vector<double> inv_sd;    // se_i / s_i
  std::vector<double> scale;     // 1 / I_i, or I_i under the printed formula
};

StudyTerms study_terms(const PredictiveDraw& draw, const Dataset& data, bool extrapolate, Formula formula) {
  StudyTerms t;
  const std::size_t n = data.size();
  t.mean.resize(n);
  t.inv_sd.resize(n);
  t.scale.assign(n, 1.0);
  const bool selection = draw.bias == BiasKind::selection && draw.weights && !draw.weights->is_constant();
  const double beta = extrapolate ? 0.0 : draw.beta;
  for (std::size_t i = 0; i < n; ++i) {
    const double se = data.studies[i].se();
    const double m = mean_structure(draw.bias, draw.mu, beta, se);
    const double s = std::sqrt(draw.tau * draw.tau + se * se);
    t.mean[i] = m / se;
    t.inv_sd[i] = se / s;
    if (selection) {
      const double integral = selection_integral_I(draw.mu, draw.tau, *draw.weights, se, draw.direction);
      if (extrapolate && !(integral >= 1e-10)) {
        std::ostringstream msg;
        msg << "selection normalizer I=" << integral << " below 1e-10 at mu=" << draw.mu << ", tau=" << draw.tau
            << ", se=" << se;
        throw NumericalError(msg.str());
      }
      t.scale[i] = extrapolate && formula == Formula::printed ? integral : 1.0 / integral;
    }
  }
  return t;
}

double weight(const PredictiveDraw& draw, double z) {
  if (draw.bias != BiasKind::selection || !draw.weights) return 1.0;
  return (*draw.weights)(draw.direction * z);
}

// Mean over studies of the per-study z density, times w(z) when weighted.
double evaluate(const StudyTerms& t, double z, double w) {
  double sum = 0.0;
  const std::size_t n = t.mean.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (z - t.mean[i]) * t.inv_sd[i];
    sum += normal::pdf(x) * t.inv_sd[i] * w * t.scale[i];
  }
  return sum / static_cast<double>(n);
}

DensityMatrix density_matrix(std::span<const PredictiveDraw> draws, const Dataset& data,
                             std::span<const double> grid, bool extrapolate, Formula formula, int threads) {
  validate_dataset(data);
  DensityMatrix m;
  m.rows = draws.size();
  m.cols = grid.size();
  m.values.resize(m.rows * m.cols);
  parallel_for(m.rows, threads, [&](std::size_t r) {
    const auto& draw = draws[r];
    const auto terms = study_terms(draw, data, extrapolate, formula);
    const bool weighted = !extrapolate;
    for (std::size_t c = 0; c < m.cols; ++c) {
      m.values[r * m.cols + c] = evaluate(terms, grid[c], weighted ? weight(draw, grid[c]) : 1.0);
    }
  });
  return m;
}

}  // namespace

void GridConfig::validate() const {
  std::vector<std::string> issues;
  if (!(z_min < z_max) || !std::isfinite(z_min) || !std::isfinite(z_max)) issues.emplace_back("grid needs z_min < z_max");
  if (points < 51) issues.emplace_back("grid needs at least 51 points");
  if (!(level > 0.0 && level < 1.0)) issues.emplace_back("band level must be in (0,1)");
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::vector<double> GridConfig::grid() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(points));
  const double step = (z_max - z_min) / (points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = z_min + step * i;
  out.back() = z_max;
  return out;
}

PredictiveDraw predictive_draw(const ModelSpec& spec, const Theta& theta, int direction) {
  PredictiveDraw d;
  d.bias = spec.bias;
  d.mu = theta.mu;
  d.tau = theta.tau;
  d.beta = spec.bias == BiasKind::pet || spec.bias == BiasKind::peese ? theta.beta : 0.0;
  d.direction = direction >= 0 ? 1 : -1;
  if (spec.bias == BiasKind::selection) d.weights = WeightFunction(*spec.selection, theta.omega);
  return d;
}

std::vector<PredictiveDraw> predictive_draws(const ModelSpace& space, std::span<const ModelDraw> draws,
                                             int direction) {
  std::vector<PredictiveDraw> out;
  out.reserve(draws.size());
  for (const auto& d : draws) out.push_back(predictive_draw(space.specs.at(d.model), d.theta, direction));
  return out;
}

std::vector<PredictiveDraw> predictive_draws(const ModelSpec& spec, const PosteriorDraws& draws, int direction) {
  const auto layout = ParameterLayout::of(spec);
  std::vector<PredictiveDraw> out;
  if (layout.dimension == 0) {
    out.push_back(predictive_draw(spec, theta_from_row(spec, layout, {}), direction));
    return out;
  }
  out.reserve(draws.rows());
  for (std::size_t r = 0; r < draws.rows(); ++r) {
    out.push_back(predictive_draw(spec, theta_from_row(spec, layout, draws.row(r)), direction));
  }
  return out;
}

double fitted_density(const PredictiveDraw& draw, const Dataset& data, double z) {
  const auto terms = study_terms(draw, data, false, Formula::corrected);
  return evaluate(terms, z, weight(draw, z));
}

double extrapolated_density(const PredictiveDraw& draw, const Dataset& data, double z, Formula formula) {
  const auto terms = study_terms(draw, data, true, formula);
  return evaluate(terms, z, 1.0);
}

DensityMatrix fitted_density_matrix(std::span<const PredictiveDraw> draws, const Dataset& data,
                                    std::span<const double> grid, int threads) {
  return density_matrix(draws, data, grid, false, Formula::corrected, threads);
}

DensityMatrix extrapolated_density_matrix(std::span<const PredictiveDraw> draws, const Dataset& data,
                                          std::span<const double> grid, Formula formula, int threads) {
  return density_matrix(draws, data, grid, true, formula, threads);
}

double fitted_density_mass(const PredictiveDraw& draw, const Dataset& data) {
  const auto terms = study_terms(draw, data, false, Formula::corrected);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < terms.mean.size(); ++i) {
    lo = std::min(lo, terms.mean[i] - 12.0 / terms.inv_sd[i]);
    hi = std::max(hi, terms.mean[i] + 12.0 / terms.inv_sd[i]);
  }
  std::vector<double> breaks{lo, hi};
  if (draw.bias == BiasKind::selection && draw.weights) {
    for (double c : draw.weights->z_thresholds()) {
      for (double b : {c, -c}) {
        if (b > lo && b < hi) breaks.push_back(b);
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k];
    const double b = breaks[k + 1];
    // The step weight is constant on (a, b); evaluate it at the midpoint.
    const double w = weight(draw, 0.5 * (a + b));
    const auto piece = quadrature::gauss_kronrod([&](double z) { return evaluate(terms, z, w); }, a, b,
                                                 quadrature::Tolerance{1e-12, 1e-9});
    total += piece.value;
  }
  return total;
}

DensityBand pointwise_band(const DensityMatrix& matrix, double level) {
  if (matrix.rows == 0) throw ValidationError("band needs at least one draw");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("band level must be in (0,1)");
  DensityBand band;
  band.mean.resize(matrix.cols);
  band.lower.resize(matrix.cols);
  band.upper.resize(matrix.cols);
  std::vector<double> column(matrix.rows);
  for (std::size_t c = 0; c < matrix.cols; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < matrix.rows; ++r) {
      column[r] = matrix.at(r, c);
      sum += column[r];
    }
    band.mean[c] = sum / static_cast<double>(matrix.rows);
    std::sort(column.begin(), column.end());
    band.lower[c] = quantile_sorted(column, 0.5 * (1.0 - level));
    band.upper[c] = quantile_sorted(column, 0.5 * (1.0 + level));
    // Rounding in the mean can step outside an all-equal band.
    band.lower[c] = std::min(band.lower[c], band.mean[c]);
    band.upper[c] = std::max(band.upper[c], band.mean[c]);
  }
  return band;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  if (grid.size() != values.size()) throw ValidationError("grid and values differ in length");
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) total += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return total;
}

PredictiveResult predictive_curve(std::span<const PredictiveDraw> draws, const Dataset& data,
                                  const GridConfig& grid_cfg, Formula formula, int threads) {
  if (draws.empty()) throw ValidationError("predictive curve needs at least one draw");
  PredictiveResult out;
  out.curve.grid = grid_cfg.grid();
  out.fitted = fitted_density_matrix(draws, data, out.curve.grid, threads);
  out.extrapolated = extrapolated_density_matrix(draws, data, out.curve.grid, formula, threads);
  out.curve.fitted = pointwise_band(out.fitted, grid_cfg.level);
  out.curve.extrapolated = pointwise_band(out.extrapolated, grid_cfg.level);
  out.curve.mass_fitted = trapezoid(out.curve.grid, out.curve.fitted.mean);
  out.curve.mass_extrapolated = trapezoid(out.curve.grid, out.curve.extrapolated.mean);
  if (out.curve.mass_fitted < 0.98) {
    std::ostringstream msg;
    msg << "grid [" << grid_cfg.z_min << ", " << grid_cfg.z_max << "] holds only " << out.curve.mass_fitted
        << " of the fitted predictive mass";
    out.warnings.push_back(msg.str());
  }
  return out;
}

// ---------------------------------------------------------------------------

double critical_z(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must be in (0,1)");
  return -normal::quantile(0.5 * alpha);
}

double edr(const PredictiveDraw& draw, const Dataset& data, double threshold) {
  validate_dataset(data);
  double sum = 0.0;
  for (const auto& s : data.studies) {
    const double se = s.se();
    const double sd = std::sqrt(draw.tau * draw.tau + se * se);
    sum += normal::sf((threshold * se - draw.mu) / sd) + normal::cdf((-threshold * se - draw.mu) / sd);
  }
  return std::clamp(sum / static_cast<double>(data.size()), 0.0, 1.0);
}

double fdr_from_edr(double edr_value, double alpha, bool* zero_edr) {
  if (zero_edr) *zero_edr = false;
  if (!(edr_value > 0.0)) {
    if (zero_edr) *zero_edr = true;
    return 1.0;
  }
  return std::min(1.0, (1.0 / edr_value - 1.0) * alpha / (1.0 - alpha));
}

double mean_selection_integral(const PredictiveDraw& draw, const Dataset& data) {
  validate_dataset(data);
  if (draw.bias != BiasKind::selection || !draw.weights || draw.weights->is_constant()) return 1.0;
  double sum = 0.0;
  for (const auto& s : data.studies) {
    sum += selection_integral_I(draw.mu, draw.tau, *draw.weights, s.se(), draw.direction);
  }
  return sum / static_cast<double>(data.size());
}

double n_missing(const PredictiveDraw& draw, const Dataset& data, Formula formula) {
  if (draw.bias != BiasKind::selection) return 0.0;
  const double ibar = mean_selection_integral(draw, data);
  if (!(ibar >= 1e-10)) {
    std::ostringstream msg;
    msg << "mean selection normalizer " << ibar << " below 1e-10 at mu=" << draw.mu << ", tau=" << draw.tau;
    throw NumericalError(msg.str());
  }
  const double n = static_cast<double>(data.size());
  if (formula == Formula::printed) return (1.0 - ibar) * n;
  return std::max(0.0, n * (1.0 - ibar) / ibar);
}

BiasMetrics bias_metrics(std::span<const PredictiveDraw> draws, const Dataset& data, const MetricOptions& options,
                         int threads) {
  if (draws.empty()) throw ValidationError("bias metrics need at least one draw");
  validate_dataset(data);
  const double threshold = std::isnan(options.threshold) ? critical_z(options.alpha) : options.threshold;
  std::vector<double> e(draws.size());
  std::vector<double> f(draws.size());
  std::vector<double> m(draws.size());
  parallel_for(draws.size(), threads, [&](std::size_t i) {
    e[i] = edr(draws[i], data, threshold);
    f[i] = fdr_from_edr(e[i], options.alpha);
    m[i] = n_missing(draws[i], data, options.formula);
  });
  BiasMetrics out;
  out.edr = summarize(e, options.level);
  out.fdr = summarize(f, options.level);
  out.n_missing = summarize(m, options.level);
  out.odr = observed_discovery_rate(data, options.odr_threshold);
  if (options.keep_draws) {
    out.edr_draws = std::move(e);
    out.fdr_draws = std::move(f);
    out.n_missing_draws = std::move(m);
  }
  return out;
}

}  // namespace zcurve
