#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace zcurve {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data or configuration violates a documented invariant. Carries
/// every violation found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  explicit ValidationError(const std::string& issue)
      : ValidationError(std::vector<std::string>{issue}) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a trustworthy value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Sampler or estimator output failed a diagnostic hard limit.
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Study / Dataset
// ---------------------------------------------------------------------------

/// One observed effect estimate. The z-statistic is always derived from
/// (y, se) and never stored independently.
class Study {
 public:
  /// Throws ValidationError unless y is finite and se is finite and > 0.
  Study(double y, double se);

  double y() const noexcept { return y_; }
  double se() const noexcept { return se_; }
  double z() const noexcept { return y_ / se_; }

  friend bool operator==(const Study&, const Study&) = default;

 private:
  double y_;
  double se_;
};

/// z = y / se. Throws ValidationError on non-finite y or se <= 0.
double zstat(double y, double se);
inline double zstat(const Study& study) noexcept { return study.z(); }

struct Dataset {
  std::vector<Study> studies;
  std::string label;

  std::size_t size() const noexcept { return studies.size(); }
  bool empty() const noexcept { return studies.empty(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Unvalidated input row, as read from a table.
struct RawRow {
  double y = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
};

/// Builds a Dataset from raw rows. On failure throws ValidationError listing
/// every offending row (1-based data-row index).
Dataset validate_dataset(std::span<const RawRow> rows, std::string label = {});

/// Re-checks an already constructed dataset (non-empty).
const Dataset& validate_dataset(const Dataset& dataset);

// ---------------------------------------------------------------------------
// Weight functions
// ---------------------------------------------------------------------------

enum class Sidedness { one_sided, two_sided };

std::string to_string(Sidedness side);
Sidedness sidedness_from_string(const std::string& text);

/// Shape of a step weight function: sidedness plus p-value cutpoints,
/// stored strictly decreasing (least-significant cut first).
struct Cutpoints {
  Sidedness side = Sidedness::two_sided;
  std::vector<double> alphas;

  /// Sorts alphas into decreasing order and validates them.
  static Cutpoints make(Sidedness side, std::vector<double> alphas);

  std::size_t intervals() const noexcept { return alphas.size() + 1; }

  friend bool operator==(const Cutpoints&, const Cutpoints&) = default;
};

/// Step selection function mapping a z-statistic to a relative publication
/// weight. omegas[0] belongs to the least significant p-interval; the last
/// omega is fixed at 1.
class WeightFunction {
 public:
  WeightFunction(Cutpoints cuts, std::vector<double> omegas);
  WeightFunction(Sidedness side, std::vector<double> alphas, std::vector<double> omegas);

  /// w == 1 everywhere.
  static WeightFunction constant();

  Sidedness side() const noexcept { return cuts_.side; }
  const std::vector<double>& alphas() const noexcept { return cuts_.alphas; }
  const std::vector<double>& omegas() const noexcept { return omegas_; }
  const Cutpoints& cutpoints() const noexcept { return cuts_; }
  bool is_constant() const noexcept { return cuts_.alphas.empty(); }

  /// z thresholds separating the intervals on the |z| scale (two-sided)
  /// or the z scale (one-sided), ascending.
  const std::vector<double>& z_thresholds() const noexcept { return thresholds_; }

  /// Index into omegas() of the interval containing z.
  std::size_t interval_of(double z) const noexcept;
  double operator()(double z) const noexcept { return omegas_[interval_of(z)]; }

 private:
  Cutpoints cuts_;
  std::vector<double> omegas_;
  std::vector<double> thresholds_;
};

// ---------------------------------------------------------------------------
// Priors and model specifications
// ---------------------------------------------------------------------------

enum class PriorKind { spike, normal, inverse_gamma, cauchy };

std::string to_string(PriorKind kind);

/// Prior distribution descriptor. Normal and Cauchy may be truncated to
/// [lower, upper]; the truncation mass is renormalized.
struct Prior {
  PriorKind kind = PriorKind::spike;
  double location = 0.0;  // spike value, normal mean, cauchy location
  double scale = 1.0;     // normal sd, cauchy scale, inverse-gamma scale
  double shape = 1.0;     // inverse-gamma shape
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static Prior spike(double value = 0.0);
  static Prior normal(double mean, double sd);
  static Prior inverse_gamma(double shape, double scale);
  static Prior cauchy(double location, double scale);
  Prior truncated(double lo, double hi) const;

  bool is_spike() const noexcept { return kind == PriorKind::spike; }

  /// Log density at x (-infinity outside support). Spikes return 0 at
  /// their value and -infinity elsewhere.
  double log_density(double x) const;
  double median() const;

  friend bool operator==(const Prior&, const Prior&) = default;
};

enum class BiasKind { none, selection, pet, peese };

std::string to_string(BiasKind kind);
BiasKind bias_kind_from_string(const std::string& text);

/// One meta-analytic model: effect x heterogeneity x bias component.
struct ModelSpec {
  std::string label;
  Prior effect = Prior::normal(0.0, 1.0);
  Prior heterogeneity = Prior::inverse_gamma(1.0, 0.15);
  BiasKind bias = BiasKind::none;
  /// Present iff bias == selection.
  std::optional<Cutpoints> selection;
  /// Dirichlet concentration over weight increments (one per interval).
  std::vector<double> omega_concentration;
  /// PET/PEESE slope prior; ignored otherwise.
  Prior slope = Prior::spike(0.0);
  double prior_prob = 1.0;

  bool has_effect() const noexcept { return !effect.is_spike(); }
  bool has_heterogeneity() const noexcept { return !heterogeneity.is_spike(); }
  bool has_bias() const noexcept { return bias != BiasKind::none; }

  /// Throws ValidationError on an inconsistent spec.
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Column positions of the free parameters of a ModelSpec.
struct ParameterLayout {
  static constexpr int absent = -1;
  int mu = absent;
  int tau = absent;
  int beta = absent;
  int omega_begin = absent;
  int omega_count = 0;
  int dimension = 0;

  static ParameterLayout of(const ModelSpec& spec);
  std::vector<std::string> names() const;
};

/// A full parameter point. omega holds every interval weight including the
/// fixed most-significant 1; empty for non-selection models.
struct Theta {
  double mu = 0.0;
  double tau = 0.0;
  double beta = 0.0;
  std::vector<double> omega;
};

/// Fills a Theta from a row of free parameters (spikes fixed at their value).
Theta theta_from_row(const ModelSpec& spec, const ParameterLayout& layout,
                     std::span<const double> row);
std::vector<double> row_from_theta(const ModelSpec& spec, const ParameterLayout& layout,
                                   const Theta& theta);

// ---------------------------------------------------------------------------
// Posterior output
// ---------------------------------------------------------------------------

struct ParameterDiagnostics {
  std::string name;
  double rhat = 1.0;
  double ess = 0.0;
  double acceptance = 0.0;
};

struct PosteriorDraws {
  std::vector<std::string> names;
  /// Row-major, rows ordered by chain then iteration.
  std::vector<double> values;
  std::vector<int> chain_ids;
  std::uint64_t seed = 0;
  std::vector<ParameterDiagnostics> diagnostics;
  std::vector<std::string> warnings;

  std::size_t parameters() const noexcept { return names.size(); }
  std::size_t rows() const noexcept { return chain_ids.size(); }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * names.size(), names.size()};
  }
  std::vector<double> column(std::size_t j) const;
};

/// Posterior median and central interval.
struct Interval {
  double median = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Median and central `level` interval of values (type-7 quantiles).
Interval summarize(std::span<const double> values, double level = 0.95);

/// Type-7 (linear interpolation) empirical quantile of sorted values.
double quantile_sorted(std::span<const double> sorted, double p);

// ---------------------------------------------------------------------------
// Predictive output
// ---------------------------------------------------------------------------

struct DensityBand {
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct PredictiveCurve {
  std::vector<double> grid;
  DensityBand fitted;
  DensityBand extrapolated;
  double mass_fitted = 0.0;
  double mass_extrapolated = 0.0;
};

struct BiasMetrics {
  Interval edr;
  Interval fdr;
  Interval n_missing;
  double odr = 0.0;
  /// Optional retained per-draw values, aligned by draw.
  std::vector<double> edr_draws;
  std::vector<double> fdr_draws;
  std::vector<double> n_missing_draws;
};

}  // namespace zcurve
