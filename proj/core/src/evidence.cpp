#include "zcurve/evidence.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "zcurve/random.hpp"

namespace zcurve {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> values) {
  double top = -inf;
  for (double v : values) top = std::max(top, v);
  if (!(top > -inf)) return -inf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

// Plain Nelder-Mead minimizer; the objective may return +inf.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> start, double step, int max_iter) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    if (std::isfinite(values[worst]) && std::fabs(values[worst] - values[best]) < 1e-12 * (1.0 + std::fabs(values[best]))) {
      double spread = 0.0;
      for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t k = 0; k < n; ++k) spread = std::max(spread, std::fabs(simplex[i][k] - simplex[best][k]));
      }
      if (spread < 1e-9) break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    auto along = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + coef * (simplex[worst][k] - centroid[k]);
      return x;
    };
    auto reflected = along(-1.0);
    const double fr = f(reflected);
    if (fr < values[best]) {
      auto expanded = along(-2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = std::move(expanded);
        values[worst] = fe;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = std::move(reflected);
      values[worst] = fr;
    } else {
      auto contracted = fr < values[worst] ? along(-0.5) : along(0.5);
      const double fc = f(contracted);
      if (fc < std::min(fr, values[worst])) {
        simplex[worst] = std::move(contracted);
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
          values[i] = f(simplex[i]);
        }
      }
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return simplex[best];
}

struct Laplace {
  std::vector<double> mode;
  double log_density_at_mode = -inf;
  Eigen::MatrixXd chol;  // lower factor of the covariance
};

Eigen::MatrixXd hessian(const std::function<double(const std::vector<double>&)>& f,
                        const std::vector<double>& x, double h) {
  const std::size_t n = x.size();
  Eigen::MatrixXd out(n, n);
  const double f0 = f(x);
  auto shifted = [&](std::size_t i, double di, std::size_t j, double dj) {
    auto y = x;
    y[i] += di;
    y[j] += dj;
    return f(y);
  };
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = (shifted(i, h, i, 0.0) - 2.0 * f0 + shifted(i, -h, i, 0.0)) / (h * h);
    for (std::size_t j = 0; j < i; ++j) {
      const double v = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) + shifted(i, -h, j, -h)) /
                       (4.0 * h * h);
      out(i, j) = out(j, i) = v;
    }
  }
  return out;
}

Laplace laplace_approximation(const PosteriorTarget& target) {
  const auto n = static_cast<std::size_t>(target.dimension());
  Theta scratch;
  auto neg = [&](const std::vector<double>& u) {
    const double v = target.log_density(u, scratch);
    return v > -inf ? -v : inf;
  };

  std::vector<double> x = target.initial_point();
  for (int round = 0; round < 3; ++round) x = nelder_mead(neg, x, round == 0 ? 0.5 : 0.05, 4000);

  Laplace out;
  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(n, n);
  // A few Newton steps from the simplex optimum, guarded by line search.
  for (int step = 0; step < 6; ++step) {
    precision = hessian(neg, x, 1e-3);
    Eigen::VectorXd grad(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto up = x;
      auto down = x;
      up[i] += 1e-5;
      down[i] -= 1e-5;
      grad(i) = (neg(up) - neg(down)) / 2e-5;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success || !grad.allFinite()) break;
    const Eigen::VectorXd delta = llt.solve(grad);
    const double before = neg(x);
    bool improved = false;
    for (double scale = 1.0; scale > 1e-3; scale *= 0.5) {
      auto trial = x;
      for (std::size_t i = 0; i < n; ++i) trial[i] -= scale * delta(i);
      if (neg(trial) <= before) {
        x = std::move(trial);
        improved = true;
        break;
      }
    }
    if (!improved || delta.norm() < 1e-10) break;
  }
  precision = hessian(neg, x, 1e-3);

  out.mode = x;
  out.log_density_at_mode = target.log_density(x, scratch);
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() == Eigen::Success && precision.allFinite()) {
    out.chol = Eigen::MatrixXd(llt.solve(Eigen::MatrixXd::Identity(n, n))).llt().matrixL();
  } else {
    out.chol = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::fabs(precision(i, i));
      out.chol(i, i) = std::isfinite(c) && c > 1e-8 ? 1.0 / std::sqrt(c) : 1.0;
    }
  }
  return out;
}

std::string describe_estimates(double last, double previous) {
  std::ostringstream msg;
  msg << "last two estimates " << last << " and " << previous;
  return msg.str();
}

}  // namespace

std::string to_string(Component component) {
  switch (component) {
    case Component::effect: return "effect";
    case Component::heterogeneity: return "heterogeneity";
    case Component::bias: return "bias";
  }
  return "?";
}

std::string to_string(EvidenceMethod method) {
  switch (method) {
    case EvidenceMethod::exact: return "exact";
    case EvidenceMethod::quadrature: return "quadrature";
    case EvidenceMethod::importance: return "importance";
  }
  return "?";
}

bool ModelSpace::has(const ModelSpec& spec, Component component) noexcept {
  switch (component) {
    case Component::effect: return spec.has_effect();
    case Component::heterogeneity: return spec.has_heterogeneity();
    case Component::bias: return spec.has_bias();
  }
  return false;
}

double ModelSpace::prior_inclusion(Component component) const noexcept {
  double total = 0.0;
  for (const auto& s : specs) {
    if (has(s, component)) total += s.prior_prob;
  }
  return total;
}

void ModelSpace::validate() const {
  std::vector<std::string> issues;
  if (specs.empty()) throw ValidationError("model space is empty");
  double total = 0.0;
  for (const auto& s : specs) {
    try {
      s.validate();
    } catch (const ValidationError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
    total += s.prior_prob;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "prior model probabilities sum to " << total << ", not 1";
    issues.push_back(msg.str());
  }
  for (Component c : {Component::effect, Component::heterogeneity, Component::bias}) {
    const bool with = std::any_of(specs.begin(), specs.end(), [&](const ModelSpec& s) { return has(s, c); });
    const bool without = std::any_of(specs.begin(), specs.end(), [&](const ModelSpec& s) { return !has(s, c); });
    if (!with || !without) issues.push_back("component '" + to_string(c) + "' lacks models on one side");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

ModelSpace default_model_space() {
  struct BiasOption {
    std::string name;
    BiasKind kind;
    std::optional<Cutpoints> cuts;
    Prior slope;
    double prob;
  };
  const auto one = Sidedness::one_sided;
  const auto two = Sidedness::two_sided;
  const double selection_prob = 0.5 * 0.5 / 6.0;
  const double regression_prob = 0.5 * 0.5 / 2.0;
  const std::vector<BiasOption> biases = {
      {"none", BiasKind::none, std::nullopt, Prior::spike(0.0), 0.5},
      {"S1", BiasKind::selection, Cutpoints::make(one, {0.05}), Prior::spike(0.0), selection_prob},
      {"S2", BiasKind::selection, Cutpoints::make(one, {0.05, 0.10}), Prior::spike(0.0), selection_prob},
      {"S3", BiasKind::selection, Cutpoints::make(one, {0.05, 0.50}), Prior::spike(0.0), selection_prob},
      {"S4", BiasKind::selection, Cutpoints::make(one, {0.05, 0.10, 0.50}), Prior::spike(0.0), selection_prob},
      {"S5", BiasKind::selection, Cutpoints::make(two, {0.05}), Prior::spike(0.0), selection_prob},
      {"S6", BiasKind::selection, Cutpoints::make(two, {0.05, 0.10}), Prior::spike(0.0), selection_prob},
      {"PET", BiasKind::pet, std::nullopt, Prior::cauchy(0.0, 1.0).truncated(0.0, inf), regression_prob},
      {"PEESE", BiasKind::peese, std::nullopt, Prior::cauchy(0.0, 5.0).truncated(0.0, inf), regression_prob},
  };

  ModelSpace space;
  for (bool effect : {false, true}) {
    for (bool heterogeneity : {false, true}) {
      for (const auto& b : biases) {
        ModelSpec spec;
        spec.effect = effect ? Prior::normal(0.0, 1.0) : Prior::spike(0.0);
        spec.heterogeneity = heterogeneity ? Prior::inverse_gamma(1.0, 0.15) : Prior::spike(0.0);
        spec.bias = b.kind;
        spec.selection = b.cuts;
        if (b.cuts) spec.omega_concentration.assign(b.cuts->intervals(), 1.0);
        spec.slope = b.slope;
        spec.prior_prob = 0.5 * 0.5 * b.prob;
        spec.label = std::string(effect ? "mu" : "mu0") + "." + (heterogeneity ? "tau" : "tau0") + "." + b.name;
        space.specs.push_back(std::move(spec));
      }
    }
  }
  return space;
}

// ---------------------------------------------------------------------------

EvidenceEstimate log_marginal_quadrature(const PosteriorTarget& target, const QuadratureOptions& options) {
  const int dim = target.dimension();
  EvidenceEstimate out;
  if (dim == 0) {
    Theta theta;
    target.to_theta({}, theta);
    out.log_ml = target.log_likelihood(theta) + target.log_prior(theta);
    out.method = EvidenceMethod::exact;
    out.evaluations = 1;
    return out;
  }
  if (dim > options.max_dimension) {
    throw ValidationError("quadrature evidence supports at most " + std::to_string(options.max_dimension) +
                          " free parameters; model '" + target.spec().label + "' has " + std::to_string(dim));
  }

  const Laplace lap = laplace_approximation(target);
  if (!(lap.log_density_at_mode > -inf)) {
    throw NumericalError("model '" + target.spec().label + "': no finite posterior mode found");
  }
  const auto n = static_cast<std::size_t>(dim);
  const double log_det = lap.chol.diagonal().array().abs().log().sum();

  // Nested Kronrod runs on t in (-1,1)^d with v = t / (1 - t^2). The cubature
  // runs on s in (0,1)^d with v = c logit(s), which flattens a near-Gaussian
  // integrand. Then u = mode + L v.
  const bool cubature = dim > 2;
  constexpr double c = 1.5;
  Theta scratch;
  std::vector<double> u(n);
  Eigen::VectorXd v(n);
  auto integrand = [&](std::span<const double> t) {
    double log_jac = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (cubature) {
        if (!(t[i] > 0.0 && t[i] < 1.0)) return 0.0;
        const double lo = std::log(t[i]);
        const double hi = std::log1p(-t[i]);
        v(i) = c * (lo - hi);
        log_jac += std::log(c) - lo - hi;
      } else {
        const double w = 1.0 - t[i] * t[i];
        if (!(w > 0.0)) return 0.0;
        v(i) = t[i] / w;
        log_jac += std::log1p(t[i] * t[i]) - 2.0 * std::log(w);
      }
    }
    const Eigen::VectorXd shift = lap.chol * v;
    for (std::size_t i = 0; i < n; ++i) u[i] = lap.mode[i] + shift(i);
    const double ld = target.log_density(u, scratch);
    if (!(ld > -inf)) return 0.0;
    return std::exp(ld - lap.log_density_at_mode + log_jac);
  };

  quadrature::Result result;
  if (dim == 1) {
    std::vector<double> t(1);
    result = quadrature::gauss_kronrod(
        [&](double x) {
          t[0] = x;
          return integrand(t);
        },
        -1.0, 1.0, options.tolerance);
  } else if (dim == 2) {
    std::vector<double> t(2);
    std::size_t inner_evaluations = 0;
    bool inner_ok = true;
    const quadrature::Tolerance inner_tol{options.tolerance.absolute * 1e-2 + 1e-14,
                                          options.tolerance.relative * 0.1};
    result = quadrature::gauss_kronrod(
        [&](double outer) {
          const auto inner = quadrature::gauss_kronrod(
              [&](double x) {
                t[0] = outer;
                t[1] = x;
                return integrand(t);
              },
              -1.0, 1.0, inner_tol);
          inner_evaluations += inner.evaluations;
          inner_ok = inner_ok && inner.converged;
          return inner.value;
        },
        -1.0, 1.0, options.tolerance);
    result.evaluations = inner_evaluations;
    if (!inner_ok) out.warnings.emplace_back("inner quadrature did not reach tolerance everywhere");
  } else {
    const std::vector<double> lower(n, 0.0);
    const std::vector<double> upper(n, 1.0);
    result = quadrature::genz_malik(integrand, lower, upper, options.cubature_tolerance,
                                    options.max_evaluations);
  }

  if (!(result.value > 0.0) || !std::isfinite(result.value)) {
    throw NumericalError("model '" + target.spec().label + "': quadrature produced a non-positive integral (" +
                         describe_estimates(result.value, result.previous) + ")");
  }
  const double log_offset = lap.log_density_at_mode + log_det;
  if (!result.converged) {
    throw NumericalError("model '" + target.spec().label + "': quadrature did not converge; " +
                         describe_estimates(log_offset + std::log(result.value),
                                            log_offset + std::log(std::max(result.previous, 1e-300))));
  }
  out.log_ml = log_offset + std::log(result.value);
  out.error = result.error / result.value;
  out.method = EvidenceMethod::quadrature;
  out.evaluations = result.evaluations;
  return out;
}

EvidenceEstimate log_marginal_importance(const PosteriorTarget& target, const PosteriorDraws& draws,
                                         const ImportanceOptions& options) {
  const int dim = target.dimension();
  if (dim == 0) {
    auto exact = log_marginal_quadrature(target);
    exact.method = EvidenceMethod::exact;
    return exact;
  }
  if (draws.rows() < static_cast<std::size_t>(dim) + 2) {
    throw ValidationError("importance sampling needs posterior draws for model '" + target.spec().label + "'");
  }
  const auto n = static_cast<std::size_t>(dim);
  const auto layout = target.layout();

  Eigen::MatrixXd unconstrained(draws.rows(), n);
  for (std::size_t r = 0; r < draws.rows(); ++r) {
    const auto theta = theta_from_row(target.spec(), layout, draws.row(r));
    const auto u = target.to_unconstrained(theta);
    for (std::size_t k = 0; k < n; ++k) unconstrained(r, k) = u[k];
  }
  if (!unconstrained.allFinite()) {
    throw NumericalError("model '" + target.spec().label + "': posterior draws on the support boundary");
  }
  const Eigen::VectorXd mean = unconstrained.colwise().mean();
  const Eigen::MatrixXd centered = unconstrained.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(draws.rows() - 1);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  for (double jitter = 1e-10; llt.info() != Eigen::Success && jitter < 1.0; jitter *= 10.0) {
    cov += jitter * Eigen::MatrixXd::Identity(n, n);
    llt.compute(cov);
  }
  if (llt.info() != Eigen::Success) {
    throw NumericalError("model '" + target.spec().label + "': proposal covariance is not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();
  const double log_det = chol.diagonal().array().log().sum();
  const double df = options.df;
  const double d = static_cast<double>(n);
  const double log_norm = std::lgamma(0.5 * (df + d)) - std::lgamma(0.5 * df) - 0.5 * d * std::log(df * M_PI) - log_det;

  const std::size_t samples = options.samples > 0 ? options.samples : draws.rows();
  Engine rng(options.seed);
  std::vector<double> log_weights(samples);
  Theta scratch;
  std::vector<double> u(n);
  Eigen::VectorXd z(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < n; ++k) z(k) = standard_normal(rng);
    double chi2 = 0.0;
    for (int k = 0; k < static_cast<int>(std::lround(df)); ++k) {
      const double g = standard_normal(rng);
      chi2 += g * g;
    }
    const double scale = std::sqrt(df / chi2);
    const Eigen::VectorXd x = mean + chol * (z * scale);
    for (std::size_t k = 0; k < n; ++k) u[k] = x(k);
    const double delta2 = (z * scale).squaredNorm();
    const double log_q = log_norm - 0.5 * (df + d) * std::log1p(delta2 / df);
    log_weights[s] = target.log_density(u, scratch) - log_q;
  }

  const double lse = log_sum_exp(log_weights);
  if (!(lse > -inf)) throw NumericalError("model '" + target.spec().label + "': all importance weights are zero");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double lw : log_weights) {
    const double w = std::exp(lw - lse);
    sum += w;
    sum_sq += w * w;
  }
  const double m = static_cast<double>(samples);
  const double ess = sum * sum / sum_sq;
  // Normalized weights sum to 1, so the relative variance of the mean is
  // (m * sum_sq - 1) / (m - 1).
  const double rel_var = std::max(0.0, (m * sum_sq - 1.0) / (m - 1.0));

  EvidenceEstimate out;
  out.log_ml = lse - std::log(m);
  out.error = std::sqrt(rel_var);
  out.method = EvidenceMethod::importance;
  out.evaluations = samples;
  out.ess_fraction = ess / m;
  if (out.ess_fraction < options.fail_fraction) {
    std::ostringstream msg;
    msg << "model '" << target.spec().label << "': importance ESS fraction " << out.ess_fraction << " below "
        << options.fail_fraction;
    throw DiagnosticError(msg.str());
  }
  if (out.ess_fraction < options.warn_fraction) {
    std::ostringstream msg;
    msg << "importance ESS fraction " << out.ess_fraction << " below " << options.warn_fraction;
    out.warnings.push_back(msg.str());
  }
  return out;
}

EvidenceEstimate log_marginal(const PosteriorTarget& target, const PosteriorDraws& draws,
                              const ImportanceOptions& importance, const QuadratureOptions& quadrature) {
  if (target.dimension() <= quadrature.max_dimension) return log_marginal_quadrature(target, quadrature);
  return log_marginal_importance(target, draws, importance);
}

// ---------------------------------------------------------------------------

std::vector<double> posterior_model_probs(const ModelSpace& space, std::span<const double> log_ml) {
  if (log_ml.size() != space.size()) throw ValidationError("need one log evidence per model");
  std::vector<double> terms(space.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double prior = space.specs[k].prior_prob;
    terms[k] = prior > 0.0 && !std::isnan(log_ml[k]) ? std::log(prior) + log_ml[k] : -inf;
  }
  const double total = log_sum_exp(terms);
  if (!(total > -inf) || !std::isfinite(total)) {
    throw NumericalError("no model has finite evidence and positive prior probability");
  }
  std::vector<double> out(terms.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::exp(terms[k] - total);
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& p : out) p /= sum;
  return out;
}

InclusionBayesFactor inclusion_bf(const ModelSpace& space, std::span<const double> posterior,
                                  Component component) {
  if (posterior.size() != space.size()) throw ValidationError("need one posterior probability per model");
  InclusionBayesFactor out;
  double prior_in = 0.0;
  double prior_out = 0.0;
  double post_in = 0.0;
  double post_out = 0.0;
  for (std::size_t k = 0; k < space.size(); ++k) {
    const bool in = ModelSpace::has(space.specs[k], component);
    (in ? prior_in : prior_out) += space.specs[k].prior_prob;
    (in ? post_in : post_out) += posterior[k];
  }
  if (!(prior_in > 0.0) || !(prior_out > 0.0)) {
    throw ValidationError("component '" + to_string(component) + "' needs prior mass on both sides");
  }
  out.prior = prior_in / (prior_in + prior_out);
  out.posterior = post_in / (post_in + post_out);
  if (post_out <= 0.0) {
    out.value = inf;
    out.flag = InclusionBayesFactor::Flag::infinite;
  } else if (post_in <= 0.0) {
    out.value = 0.0;
    out.flag = InclusionBayesFactor::Flag::zero;
  } else {
    out.value = (post_in / post_out) / (prior_in / prior_out);
  }
  return out;
}

std::vector<double> conditional_probs(const ModelSpace& space, std::span<const double> posterior,
                                      Component component) {
  std::vector<double> out(space.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < space.size(); ++k) {
    if (ModelSpace::has(space.specs[k], component)) {
      out[k] = posterior[k];
      total += posterior[k];
    }
  }
  if (total > 0.0) {
    for (double& p : out) p /= total;
  }
  return out;
}

std::vector<ModelDraw> model_averaged_draws(const ModelSpace& space, std::span<const PosteriorDraws> fits,
                                            std::span<const double> probs, std::size_t count,
                                            std::uint64_t seed) {
  if (fits.size() != space.size() || probs.size() != space.size()) {
    throw ValidationError("need fits and probabilities for every model");
  }
  std::vector<double> cumulative(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cumulative.begin());
  const double total = cumulative.empty() ? 0.0 : cumulative.back();
  if (!(total > 0.0)) throw ValidationError("mixture probabilities have no mass");

  std::vector<ParameterLayout> layouts;
  for (const auto& s : space.specs) layouts.push_back(ParameterLayout::of(s));

  Engine rng(seed);
  std::vector<ModelDraw> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform01(rng) * total;
    auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    k = std::min(k, probs.size() - 1);
    while (probs[k] <= 0.0 && k > 0) --k;  // guards u landing exactly on an edge
    const auto& spec = space.specs[k];
    const auto& fit = fits[k];
    ModelDraw draw;
    draw.model = k;
    if (layouts[k].dimension == 0) {
      draw.theta = theta_from_row(spec, layouts[k], {});
    } else {
      if (fit.rows() == 0) throw ValidationError("model '" + spec.label + "' has no posterior draws");
      const auto r = static_cast<std::size_t>(uniform_index(rng, fit.rows()));
      draw.theta = theta_from_row(spec, layouts[k], fit.row(r));
    }
    out.push_back(std::move(draw));
  }
  return out;
}

}  // namespace zcurve
