#include "zcurve/fit_io.hpp"

#include <cmath>
#include <fstream>

#include "zcurve/model_space_io.hpp"

namespace zcurve {

namespace {

using nlohmann::json;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// NaN and infinities have no JSON form; they are stored as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number(const json& j) { return j.is_null() ? nan : j.get<double>(); }

json interval_json(const Interval& i) {
  return {{"median", number(i.median)}, {"lower", number(i.lower)}, {"upper", number(i.upper)}};
}
Interval interval_from(const json& j) {
  return {number(j.at("median")), number(j.at("lower")), number(j.at("upper"))};
}

std::string flag_name(InclusionBayesFactor::Flag f) {
  switch (f) {
    case InclusionBayesFactor::Flag::finite: return "finite";
    case InclusionBayesFactor::Flag::infinite: return "infinite";
    case InclusionBayesFactor::Flag::zero: return "zero";
  }
  return "finite";
}

json bf_json(const InclusionBayesFactor& bf) {
  return {{"value", number(bf.value)}, {"flag", flag_name(bf.flag)}, {"prior", bf.prior}, {"posterior", bf.posterior}};
}

InclusionBayesFactor bf_from(const json& j) {
  InclusionBayesFactor bf;
  const auto flag = j.at("flag").get<std::string>();
  bf.flag = flag == "infinite" ? InclusionBayesFactor::Flag::infinite
            : flag == "zero"   ? InclusionBayesFactor::Flag::zero
                               : InclusionBayesFactor::Flag::finite;
  bf.value = bf.flag == InclusionBayesFactor::Flag::infinite ? std::numeric_limits<double>::infinity()
                                                             : number(j.at("value"));
  bf.prior = j.at("prior").get<double>();
  bf.posterior = j.at("posterior").get<double>();
  return bf;
}

EvidenceMethod method_from(const std::string& s) {
  if (s == "exact") return EvidenceMethod::exact;
  if (s == "quadrature") return EvidenceMethod::quadrature;
  if (s == "importance") return EvidenceMethod::importance;
  throw ParseError("unknown evidence method '" + s + "'");
}

json config_json(const FitConfig& c) {
  const auto& s = c.sampler;
  json j;
  j["sampler"] = {{"chains", s.chains},
                  {"warmup", s.warmup},
                  {"iterations", s.iterations},
                  {"seed", s.seed},
                  {"target_acceptance", s.target_acceptance},
                  {"adaptation_window", s.adaptation_window},
                  {"init_jitter", s.init_jitter}};
  j["quadrature"] = {{"max_dimension", c.quadrature.max_dimension},
                     {"relative_tolerance", c.quadrature.tolerance.relative},
                     {"absolute_tolerance", c.quadrature.tolerance.absolute},
                     {"cubature_relative_tolerance", c.quadrature.cubature_tolerance.relative},
                     {"cubature_absolute_tolerance", c.quadrature.cubature_tolerance.absolute},
                     {"max_evaluations", c.quadrature.max_evaluations}};
  j["importance"] = {{"df", c.importance.df},
                     {"samples", c.importance.samples},
                     {"warn_fraction", c.importance.warn_fraction},
                     {"fail_fraction", c.importance.fail_fraction}};
  j["direction"] = c.direction;
  j["ensemble_draws"] = c.ensemble_draws;
  j["max_stored_draws"] = c.max_stored_draws;
  j["full_ensemble_metrics"] = c.full_ensemble_metrics;
  j["metrics"] = {{"alpha", c.metrics.alpha},
                  {"threshold", number(c.metrics.threshold)},
                  {"odr_threshold", c.metrics.odr_threshold},
                  {"level", c.metrics.level},
                  {"formula", c.metrics.formula == Formula::printed ? "printed" : "corrected"}};
  return j;
}

FitConfig config_from(const json& j) {
  FitConfig c;
  const auto& s = j.at("sampler");
  c.sampler.chains = s.at("chains").get<int>();
  c.sampler.warmup = s.at("warmup").get<int>();
  c.sampler.iterations = s.at("iterations").get<int>();
  c.sampler.seed = s.at("seed").get<std::uint64_t>();
  c.sampler.target_acceptance = s.at("target_acceptance").get<double>();
  c.sampler.adaptation_window = s.at("adaptation_window").get<int>();
  c.sampler.init_jitter = s.at("init_jitter").get<double>();
  const auto& q = j.at("quadrature");
  c.quadrature.max_dimension = q.at("max_dimension").get<int>();
  c.quadrature.tolerance = {q.at("absolute_tolerance").get<double>(), q.at("relative_tolerance").get<double>()};
  c.quadrature.cubature_tolerance = {q.at("cubature_absolute_tolerance").get<double>(),
                                     q.at("cubature_relative_tolerance").get<double>()};
  c.quadrature.max_evaluations = q.at("max_evaluations").get<std::size_t>();
  const auto& i = j.at("importance");
  c.importance.df = i.at("df").get<double>();
  c.importance.samples = i.at("samples").get<std::size_t>();
  c.importance.warn_fraction = i.at("warn_fraction").get<double>();
  c.importance.fail_fraction = i.at("fail_fraction").get<double>();
  c.direction = j.at("direction").get<int>();
  c.ensemble_draws = j.at("ensemble_draws").get<std::size_t>();
  c.max_stored_draws = j.at("max_stored_draws").get<std::size_t>();
  c.full_ensemble_metrics = j.at("full_ensemble_metrics").get<bool>();
  const auto& m = j.at("metrics");
  c.metrics.alpha = m.at("alpha").get<double>();
  c.metrics.threshold = number(m.at("threshold"));
  c.metrics.odr_threshold = m.at("odr_threshold").get<double>();
  c.metrics.level = m.at("level").get<double>();
  c.metrics.formula = m.at("formula").get<std::string>() == "printed" ? Formula::printed : Formula::corrected;
  return c;
}

json model_json(const ModelFit& m) {
  json j;
  j["spec"] = spec_to_json(m.spec);
  j["log_ml"] = number(m.evidence.log_ml);
  j["log_ml_error"] = number(m.evidence.error);
  j["evidence_method"] = to_string(m.evidence.method);
  j["evidence_evaluations"] = m.evidence.evaluations;
  j["ess_fraction"] = number(m.evidence.ess_fraction);
  j["evidence_warnings"] = m.evidence.warnings;
  j["posterior_prob"] = m.posterior_prob;
  json diagnostics = json::array();
  for (const auto& d : m.draws.diagnostics) {
    diagnostics.push_back(
        {{"name", d.name}, {"rhat", number(d.rhat)}, {"ess", number(d.ess)}, {"acceptance", number(d.acceptance)}});
  }
  j["diagnostics"] = std::move(diagnostics);
  json summaries = json::array();
  for (std::size_t k = 0; k < m.summaries.size(); ++k) {
    auto s = interval_json(m.summaries[k]);
    s["name"] = m.draws.names.at(k);
    summaries.push_back(std::move(s));
  }
  j["summaries"] = std::move(summaries);
  json rows = json::array();
  for (std::size_t r = 0; r < m.draws.rows(); ++r) {
    const auto row = m.draws.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["draws"] = {{"names", m.draws.names},
                {"seed", m.draws.seed},
                {"sampled_rows", m.sampled_rows},
                {"warnings", m.draws.warnings},
                {"chain_ids", m.draws.chain_ids},
                {"values", std::move(rows)}};
  return j;
}

ModelFit model_from(const json& j) {
  ModelFit m;
  m.spec = spec_from_json(j.at("spec"));
  m.evidence.log_ml = number(j.at("log_ml"));
  m.evidence.error = number(j.at("log_ml_error"));
  m.evidence.method = method_from(j.at("evidence_method").get<std::string>());
  m.evidence.evaluations = j.at("evidence_evaluations").get<std::size_t>();
  m.evidence.ess_fraction = number(j.at("ess_fraction"));
  m.evidence.warnings = j.at("evidence_warnings").get<std::vector<std::string>>();
  m.posterior_prob = j.at("posterior_prob").get<double>();
  for (const auto& d : j.at("diagnostics")) {
    m.draws.diagnostics.push_back({d.at("name").get<std::string>(), number(d.at("rhat")), number(d.at("ess")),
                                   number(d.at("acceptance"))});
  }
  for (const auto& s : j.at("summaries")) m.summaries.push_back(interval_from(s));
  const auto& d = j.at("draws");
  m.draws.names = d.at("names").get<std::vector<std::string>>();
  m.draws.seed = d.at("seed").get<std::uint64_t>();
  m.sampled_rows = d.at("sampled_rows").get<std::size_t>();
  m.draws.warnings = d.at("warnings").get<std::vector<std::string>>();
  m.draws.chain_ids = d.at("chain_ids").get<std::vector<int>>();
  for (const auto& row : d.at("values")) {
    const auto values = row.get<std::vector<double>>();
    if (values.size() != m.draws.names.size()) throw ParseError("draw row width does not match parameter names");
    m.draws.values.insert(m.draws.values.end(), values.begin(), values.end());
  }
  if (m.draws.values.size() != m.draws.chain_ids.size() * m.draws.names.size()) {
    throw ParseError("draw rows and chain ids disagree in model '" + m.spec.label + "'");
  }
  return m;
}

}  // namespace

json fit_to_json(const FitResult& fit) {
  json j;
  j["schema_version"] = FitResult::schema_version;
  j["data"] = {{"label", fit.data_label}, {"studies", fit.studies}};
  j["config"] = config_json(fit.config);
  json models = json::array();
  for (const auto& m : fit.models) models.push_back(model_json(m));
  j["models"] = std::move(models);
  j["ensemble"] = {{"bf_effect", bf_json(fit.bf_effect)},
                   {"bf_heterogeneity", bf_json(fit.bf_heterogeneity)},
                   {"bf_bias", bf_json(fit.bf_bias)},
                   {"mu", interval_json(fit.mu)},
                   {"tau", interval_json(fit.tau)}};
  j["metrics"] = {{"ensemble", fit.metrics_ensemble},
                  {"odr", fit.metrics.odr},
                  {"edr", interval_json(fit.metrics.edr)},
                  {"fdr", interval_json(fit.metrics.fdr)},
                  {"n_missing", interval_json(fit.metrics.n_missing)}};
  j["warnings"] = fit.warnings;
  return j;
}

FitResult fit_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version")) throw ParseError("not a fit file: no schema_version");
  const int version = j.at("schema_version").get<int>();
  if (version != FitResult::schema_version) {
    throw Error("fit file has schema version " + std::to_string(version) + " but this build reads version " +
                std::to_string(FitResult::schema_version) + "; re-run `zcurve fit` to regenerate it");
  }
  try {
    FitResult fit;
    fit.data_label = j.at("data").at("label").get<std::string>();
    fit.studies = j.at("data").at("studies").get<std::size_t>();
    fit.config = config_from(j.at("config"));
    for (const auto& m : j.at("models")) fit.models.push_back(model_from(m));
    const auto& e = j.at("ensemble");
    fit.bf_effect = bf_from(e.at("bf_effect"));
    fit.bf_heterogeneity = bf_from(e.at("bf_heterogeneity"));
    fit.bf_bias = bf_from(e.at("bf_bias"));
    fit.mu = interval_from(e.at("mu"));
    fit.tau = interval_from(e.at("tau"));
    const auto& m = j.at("metrics");
    fit.metrics_ensemble = m.at("ensemble").get<std::string>();
    fit.metrics.odr = m.at("odr").get<double>();
    fit.metrics.edr = interval_from(m.at("edr"));
    fit.metrics.fdr = interval_from(m.at("fdr"));
    fit.metrics.n_missing = interval_from(m.at("n_missing"));
    fit.warnings = j.at("warnings").get<std::vector<std::string>>();
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed fit file: ") + e.what());
  }
}

std::string write_fit(const FitResult& fit) { return fit_to_json(fit).dump(1) + "\n"; }

FitResult read_fit(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open fit file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("fit file '" + path.string() + "': " + e.what());
  }
  return fit_from_json(j);
}

}  // namespace zcurve
