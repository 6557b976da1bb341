#include "zcurve/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "zcurve/normal.hpp"

namespace zcurve {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) out << "; ";
    out << issues[i];
  }
  return out.str();
}

std::string describe_number(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

// ---------------------------------------------------------------------------

Study::Study(double y, double se) : y_(y), se_(se) {
  if (!std::isfinite(y)) throw ValidationError("effect size y is not finite");
  if (!std::isfinite(se)) throw ValidationError("standard error is not finite");
  if (!(se > 0.0)) throw ValidationError("standard error must be > 0, got " + describe_number(se));
}

double zstat(double y, double se) { return Study(y, se).z(); }

Dataset validate_dataset(std::span<const RawRow> rows, std::string label) {
  if (rows.empty()) throw ValidationError("empty dataset");
  std::vector<std::string> issues;
  Dataset out;
  out.label = std::move(label);
  out.studies.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string where = "row " + std::to_string(i + 1) + ": ";
    bool ok = true;
    if (!std::isfinite(row.y)) {
      issues.push_back(where + "y is not finite (" + describe_number(row.y) + ")");
      ok = false;
    }
    if (!std::isfinite(row.se)) {
      issues.push_back(where + "se is not finite (" + describe_number(row.se) + ")");
      ok = false;
    } else if (!(row.se > 0.0)) {
      issues.push_back(where + "se must be > 0 (got " + describe_number(row.se) + ")");
      ok = false;
    }
    if (ok) out.studies.emplace_back(row.y, row.se);
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return out;
}

const Dataset& validate_dataset(const Dataset& dataset) {
  if (dataset.empty()) throw ValidationError("empty dataset");
  return dataset;
}

// ---------------------------------------------------------------------------

std::string to_string(Sidedness side) {
  return side == Sidedness::one_sided ? "one-sided" : "two-sided";
}

Sidedness sidedness_from_string(const std::string& text) {
  if (text == "one-sided" || text == "one_sided" || text == "one") return Sidedness::one_sided;
  if (text == "two-sided" || text == "two_sided" || text == "two") return Sidedness::two_sided;
  throw ValidationError("unknown sidedness '" + text + "'");
}

Cutpoints Cutpoints::make(Sidedness side, std::vector<double> alphas) {
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  std::vector<std::string> issues;
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) issues.push_back("cutpoint " + describe_number(a) + " not in (0,1)");
  }
  if (std::adjacent_find(alphas.begin(), alphas.end()) != alphas.end()) {
    issues.push_back("cutpoints must be distinct");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return Cutpoints{side, std::move(alphas)};
}

WeightFunction::WeightFunction(Cutpoints cuts, std::vector<double> omegas)
    : cuts_(Cutpoints::make(cuts.side, std::move(cuts.alphas))), omegas_(std::move(omegas)) {
  std::vector<std::string> issues;
  if (omegas_.size() != cuts_.intervals()) {
    issues.push_back("expected " + std::to_string(cuts_.intervals()) + " weights, got " +
                     std::to_string(omegas_.size()));
  } else {
    for (double w : omegas_) {
      if (!(w > 0.0 && w <= 1.0)) issues.push_back("weight " + describe_number(w) + " not in (0,1]");
    }
    if (!std::is_sorted(omegas_.begin(), omegas_.end())) {
      issues.push_back("weights must be non-decreasing toward significance");
    }
    if (std::fabs(omegas_.back() - 1.0) > 1e-12) {
      issues.push_back("most significant weight must be 1");
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  omegas_.back() = 1.0;

  thresholds_.reserve(cuts_.alphas.size());
  for (double a : cuts_.alphas) {
    const double p = cuts_.side == Sidedness::two_sided ? a / 2.0 : a;
    thresholds_.push_back(-normal::quantile(p));
  }
}

WeightFunction::WeightFunction(Sidedness side, std::vector<double> alphas,
                               std::vector<double> omegas)
    : WeightFunction(Cutpoints{side, std::move(alphas)}, std::move(omegas)) {}

WeightFunction WeightFunction::constant() {
  return WeightFunction(Cutpoints{Sidedness::two_sided, {}}, {1.0});
}

std::size_t WeightFunction::interval_of(double z) const noexcept {
  const double x = cuts_.side == Sidedness::two_sided ? std::fabs(z) : z;
  return static_cast<std::size_t>(
      std::upper_bound(thresholds_.begin(), thresholds_.end(), x) - thresholds_.begin());
}

// ---------------------------------------------------------------------------

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::spike: return "spike";
    case PriorKind::normal: return "normal";
    case PriorKind::inverse_gamma: return "inverse_gamma";
    case PriorKind::cauchy: return "cauchy";
  }
  return "?";
}

Prior Prior::spike(double value) {
  Prior p;
  p.kind = PriorKind::spike;
  p.location = value;
  return p;
}

Prior Prior::normal(double mean, double sd) {
  Prior p;
  p.kind = PriorKind::normal;
  p.location = mean;
  p.scale = sd;
  return p;
}

Prior Prior::inverse_gamma(double shape, double scale) {
  Prior p;
  p.kind = PriorKind::inverse_gamma;
  p.shape = shape;
  p.scale = scale;
  p.lower = 0.0;
  return p;
}

Prior Prior::cauchy(double location, double scale) {
  Prior p;
  p.kind = PriorKind::cauchy;
  p.location = location;
  p.scale = scale;
  return p;
}

Prior Prior::truncated(double lo, double hi) const {
  Prior p = *this;
  p.lower = lo;
  p.upper = hi;
  return p;
}

namespace {

double cauchy_cdf(double x, double loc, double scale) {
  if (x == -inf) return 0.0;
  if (x == inf) return 1.0;
  return 0.5 + std::atan((x - loc) / scale) / std::numbers::pi;
}

double normal_mass(const Prior& p) {
  const double a = (p.lower - p.location) / p.scale;
  const double b = (p.upper - p.location) / p.scale;
  return normal::interval(a, b);
}

double cauchy_mass(const Prior& p) {
  return cauchy_cdf(p.upper, p.location, p.scale) - cauchy_cdf(p.lower, p.location, p.scale);
}

}  // namespace

double Prior::log_density(double x) const {
  if (kind == PriorKind::spike) return x == location ? 0.0 : -inf;
  if (std::isnan(x) || x < lower || x > upper) return -inf;
  switch (kind) {
    case PriorKind::normal:
      return normal::log_pdf(x, location, scale) - std::log(normal_mass(*this));
    case PriorKind::inverse_gamma:
      if (!(x > 0.0)) return -inf;
      return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
    case PriorKind::cauchy: {
      const double u = (x - location) / scale;
      return -std::log(std::numbers::pi * scale * (1.0 + u * u)) - std::log(cauchy_mass(*this));
    }
    case PriorKind::spike: break;
  }
  return -inf;
}

double Prior::median() const {
  switch (kind) {
    case PriorKind::spike: return location;
    case PriorKind::normal: {
      const double a = normal::cdf((lower - location) / scale);
      const double b = normal::cdf((upper - location) / scale);
      return location + scale * normal::quantile(0.5 * (a + b));
    }
    case PriorKind::inverse_gamma: {
      // Wilson-Hilferty median of Gamma(shape, 1); exact enough for starts.
      const double g = shape * std::pow(1.0 - 1.0 / (9.0 * shape), 3.0);
      return scale / (shape == 1.0 ? std::numbers::ln2 : g);
    }
    case PriorKind::cauchy: {
      const double q = 0.5 * (cauchy_cdf(lower, location, scale) + cauchy_cdf(upper, location, scale));
      return location + scale * std::tan(std::numbers::pi * (q - 0.5));
    }
  }
  return location;
}

std::string to_string(BiasKind kind) {
  switch (kind) {
    case BiasKind::none: return "none";
    case BiasKind::selection: return "selection";
    case BiasKind::pet: return "pet";
    case BiasKind::peese: return "peese";
  }
  return "?";
}

BiasKind bias_kind_from_string(const std::string& text) {
  if (text == "none") return BiasKind::none;
  if (text == "selection") return BiasKind::selection;
  if (text == "pet" || text == "PET") return BiasKind::pet;
  if (text == "peese" || text == "PEESE") return BiasKind::peese;
  throw ValidationError("unknown bias component '" + text + "'");
}

namespace {

void check_prior(const Prior& p, const std::string& what, bool nonnegative,
                 std::vector<std::string>& issues) {
  if (p.kind == PriorKind::spike) {
    if (!std::isfinite(p.location)) issues.push_back(what + ": spike value not finite");
    if (nonnegative && p.location < 0.0) issues.push_back(what + ": spike must be >= 0");
    return;
  }
  if (!(p.scale > 0.0) || !std::isfinite(p.scale)) issues.push_back(what + ": scale must be > 0");
  if (!(p.lower < p.upper)) issues.push_back(what + ": empty truncation range");
  if (p.kind == PriorKind::inverse_gamma) {
    if (!(p.shape > 0.0)) issues.push_back(what + ": shape must be > 0");
    if (p.lower != 0.0 || p.upper != inf) {
      issues.push_back(what + ": inverse-gamma prior cannot be truncated");
    }
  } else if (nonnegative && p.lower < 0.0) {
    issues.push_back(what + ": prior must be truncated to [0, inf)");
  }
}

}  // namespace

void ModelSpec::validate() const {
  std::vector<std::string> issues;
  const std::string who = label.empty() ? std::string("model") : "model '" + label + "'";
  check_prior(effect, who + " effect", false, issues);
  if (effect.kind == PriorKind::inverse_gamma) issues.push_back(who + ": effect prior cannot be inverse-gamma");
  check_prior(heterogeneity, who + " heterogeneity", true, issues);
  if (!(prior_prob >= 0.0 && prior_prob <= 1.0)) issues.push_back(who + ": prior_prob not in [0,1]");
  switch (bias) {
    case BiasKind::selection:
      if (!selection) {
        issues.push_back(who + ": selection model without cutpoints");
      } else if (selection->alphas.empty()) {
        issues.push_back(who + ": selection model needs at least one cutpoint");
      } else if (omega_concentration.size() != selection->intervals()) {
        issues.push_back(who + ": omega concentration needs one entry per p-interval");
      } else if (std::any_of(omega_concentration.begin(), omega_concentration.end(),
                             [](double a) { return !(a > 0.0); })) {
        issues.push_back(who + ": omega concentration must be > 0");
      }
      break;
    case BiasKind::pet:
    case BiasKind::peese:
      if (slope.is_spike()) issues.push_back(who + ": PET/PEESE slope needs a prior");
      check_prior(slope, who + " slope", true, issues);
      break;
    case BiasKind::none: break;
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

ParameterLayout ParameterLayout::of(const ModelSpec& spec) {
  ParameterLayout layout;
  int next = 0;
  if (spec.has_effect()) layout.mu = next++;
  if (spec.has_heterogeneity()) layout.tau = next++;
  if (spec.bias == BiasKind::pet || spec.bias == BiasKind::peese) layout.beta = next++;
  if (spec.bias == BiasKind::selection && spec.selection) {
    layout.omega_begin = next;
    layout.omega_count = static_cast<int>(spec.selection->alphas.size());
    next += layout.omega_count;
  }
  layout.dimension = next;
  return layout;
}

std::vector<std::string> ParameterLayout::names() const {
  std::vector<std::string> out(static_cast<std::size_t>(dimension));
  if (mu != absent) out[mu] = "mu";
  if (tau != absent) out[tau] = "tau";
  if (beta != absent) out[beta] = "beta";
  for (int j = 0; j < omega_count; ++j) out[omega_begin + j] = "omega[" + std::to_string(j + 1) + "]";
  return out;
}

Theta theta_from_row(const ModelSpec& spec, const ParameterLayout& layout,
                     std::span<const double> row) {
  Theta theta;
  theta.mu = layout.mu != ParameterLayout::absent ? row[layout.mu] : spec.effect.location;
  theta.tau = layout.tau != ParameterLayout::absent ? row[layout.tau] : spec.heterogeneity.location;
  theta.beta = layout.beta != ParameterLayout::absent ? row[layout.beta] : 0.0;
  if (spec.bias == BiasKind::selection) {
    theta.omega.assign(row.begin() + layout.omega_begin,
                       row.begin() + layout.omega_begin + layout.omega_count);
    theta.omega.push_back(1.0);
  }
  return theta;
}

std::vector<double> row_from_theta(const ModelSpec& spec, const ParameterLayout& layout,
                                   const Theta& theta) {
  (void)spec;
  std::vector<double> row(static_cast<std::size_t>(layout.dimension));
  if (layout.mu != ParameterLayout::absent) row[layout.mu] = theta.mu;
  if (layout.tau != ParameterLayout::absent) row[layout.tau] = theta.tau;
  if (layout.beta != ParameterLayout::absent) row[layout.beta] = theta.beta;
  for (int j = 0; j < layout.omega_count; ++j) row[layout.omega_begin + j] = theta.omega[j];
  return row;
}

// ---------------------------------------------------------------------------

std::vector<double> PosteriorDraws::column(std::size_t j) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values[i * names.size() + j];
  return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Interval summarize(std::span<const double> values, double level) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return Interval{quantile_sorted(sorted, 0.5), quantile_sorted(sorted, 0.5 * (1.0 - level)),
                  quantile_sorted(sorted, 0.5 * (1.0 + level))};
}

}  // namespace zcurve
