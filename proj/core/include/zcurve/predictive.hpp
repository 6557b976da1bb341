#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zcurve/evidence.hpp"
#include "zcurve/types.hpp"

namespace zcurve {

struct GridConfig {
  double z_min = -6.0;
  double z_max = 6.0;
  int points = 601;
  double level = 0.95;

  void validate() const;
  std::vector<double> grid() const;
};

/// One posterior draw reduced to what the predictive distributions need.
struct PredictiveDraw {
  BiasKind bias = BiasKind::none;
  double mu = 0.0;
  double tau = 0.0;
  double beta = 0.0;
  /// Selection draws only.
  std::optional<WeightFunction> weights;
  int direction = 1;
};

PredictiveDraw predictive_draw(const ModelSpec& spec, const Theta& theta, int direction = 1);
std::vector<PredictiveDraw> predictive_draws(const ModelSpace& space, std::span<const ModelDraw> draws,
                                             int direction = 1);
std::vector<PredictiveDraw> predictive_draws(const ModelSpec& spec, const PosteriorDraws& draws,
                                             int direction = 1);

/// Draws x grid points, row-major.
struct DensityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// The printed formulas (Normal * I and (1 - I) N) instead of the
/// defaults (Normal / I and N (1 - I) / I).
enum class Formula { corrected, printed };

/// z-scale density of one draw at z: the mean over studies of
/// se_i * pi(se_i z | theta, se_i).
double fitted_density(const PredictiveDraw& draw, const Dataset& data, double z);
/// Same with selection weights removed (divided by I) or PET/PEESE slopes
/// set to zero. Unadjusted draws pass through unchanged.
double extrapolated_density(const PredictiveDraw& draw, const Dataset& data, double z,
                            Formula formula = Formula::corrected);

DensityMatrix fitted_density_matrix(std::span<const PredictiveDraw> draws, const Dataset& data,
                                    std::span<const double> grid, int threads = 1);
/// Throws NumericalError if I < 1e-10 for any study.
DensityMatrix extrapolated_density_matrix(std::span<const PredictiveDraw> draws, const Dataset& data,
                                          std::span<const double> grid, Formula formula = Formula::corrected,
                                          int threads = 1);

/// Integral of the fitted density of one draw over the whole real line,
/// by adaptive quadrature over pieces split at the weight thresholds.
double fitted_density_mass(const PredictiveDraw& draw, const Dataset& data);

/// Pointwise mean and central `level` quantile band (type 7).
DensityBand pointwise_band(const DensityMatrix& matrix, double level = 0.95);

/// Trapezoidal integral of values over grid.
double trapezoid(std::span<const double> grid, std::span<const double> values);

struct PredictiveResult {
  PredictiveCurve curve;
  DensityMatrix fitted;
  DensityMatrix extrapolated;
  std::vector<std::string> warnings;
};

/// Fitted and extrapolated curves with bands. A fitted mass below 0.98 on
/// the grid is recorded as a warning.
PredictiveResult predictive_curve(std::span<const PredictiveDraw> draws, const Dataset& data,
                                  const GridConfig& grid = {}, Formula formula = Formula::corrected,
                                  int threads = 1);

// ---------------------------------------------------------------------------
// Bias metrics
// ---------------------------------------------------------------------------

/// Two-sided critical value for level alpha, e.g. 1.95996 for 0.05.
double critical_z(double alpha = 0.05);

/// Expected discovery rate of a draw with selection and slopes removed:
/// mean over studies of P(|Y / se| >= threshold).
double edr(const PredictiveDraw& draw, const Dataset& data, double threshold = critical_z());

/// Soric bound min(1, (1/edr - 1) alpha / (1 - alpha)). Returns 1 for
/// edr <= 0 and sets *zero_edr when given.
double fdr_from_edr(double edr, double alpha = 0.05, bool* zero_edr = nullptr);

/// Mean over studies of I(mu, tau, omega, se_i); 1 for non-selection draws.
double mean_selection_integral(const PredictiveDraw& draw, const Dataset& data);

/// N (1 - Ibar) / Ibar, or (1 - Ibar) N under the printed formula; exactly 0
/// for non-selection draws. Throws NumericalError if Ibar < 1e-10.
double n_missing(const PredictiveDraw& draw, const Dataset& data, Formula formula = Formula::corrected);

struct MetricOptions {
  double alpha = 0.05;
  /// EDR discovery threshold; NaN means critical_z(alpha).
  double threshold = std::numeric_limits<double>::quiet_NaN();
  double odr_threshold = 1.96;
  double level = 0.95;
  Formula formula = Formula::corrected;
  bool keep_draws = false;
};

/// Per-draw EDR, FDR and N_missing summarized by medians and central
/// intervals, plus the observed discovery rate.
BiasMetrics bias_metrics(std::span<const PredictiveDraw> draws, const Dataset& data,
                         const MetricOptions& options = {}, int threads = 1);

}  // namespace zcurve
