#include "zcurve/model_space_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace zcurve {

namespace {

using nlohmann::json;

PriorKind prior_kind_from_string(const std::string& text) {
  if (text == "spike") return PriorKind::spike;
  if (text == "normal") return PriorKind::normal;
  if (text == "inverse_gamma") return PriorKind::inverse_gamma;
  if (text == "cauchy") return PriorKind::cauchy;
  throw ParseError("unknown prior kind '" + text + "'");
}

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

json prior_to_json(const Prior& prior) {
  json j;
  j["kind"] = to_string(prior.kind);
  switch (prior.kind) {
    case PriorKind::spike:
      j["value"] = prior.location;
      return j;
    case PriorKind::normal:
      j["mean"] = prior.location;
      j["sd"] = prior.scale;
      break;
    case PriorKind::inverse_gamma:
      j["shape"] = prior.shape;
      j["scale"] = prior.scale;
      break;
    case PriorKind::cauchy:
      j["location"] = prior.location;
      j["scale"] = prior.scale;
      break;
  }
  if (std::isfinite(prior.lower)) j["lower"] = prior.lower;
  if (std::isfinite(prior.upper)) j["upper"] = prior.upper;
  return j;
}

Prior prior_from_json(const json& j) {
  const std::string where = "prior";
  const auto kind = prior_kind_from_string(field<std::string>(j, "kind", where));
  Prior p;
  switch (kind) {
    case PriorKind::spike:
      return Prior::spike(j.contains("value") ? field<double>(j, "value", where) : 0.0);
    case PriorKind::normal:
      p = Prior::normal(field<double>(j, "mean", where), field<double>(j, "sd", where));
      break;
    case PriorKind::inverse_gamma:
      p = Prior::inverse_gamma(field<double>(j, "shape", where), field<double>(j, "scale", where));
      break;
    case PriorKind::cauchy:
      p = Prior::cauchy(field<double>(j, "location", where), field<double>(j, "scale", where));
      break;
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double lo = j.contains("lower") ? field<double>(j, "lower", where) : -inf;
  const double hi = j.contains("upper") ? field<double>(j, "upper", where) : inf;
  if (std::isfinite(lo) || std::isfinite(hi)) p = p.truncated(lo, hi);
  return p;
}

json spec_to_json(const ModelSpec& spec) {
  json j;
  j["label"] = spec.label;
  j["prior_prob"] = spec.prior_prob;
  j["effect"] = prior_to_json(spec.effect);
  j["heterogeneity"] = prior_to_json(spec.heterogeneity);
  j["bias"] = to_string(spec.bias);
  if (spec.selection) {
    j["selection"] = {{"side", to_string(spec.selection->side)}, {"alphas", spec.selection->alphas}};
    j["omega_concentration"] = spec.omega_concentration;
  }
  if (spec.bias == BiasKind::pet || spec.bias == BiasKind::peese) j["slope"] = prior_to_json(spec.slope);
  return j;
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.label = j.contains("label") ? field<std::string>(j, "label", "model") : std::string{};
  const std::string where = spec.label.empty() ? std::string("model") : "model '" + spec.label + "'";
  spec.prior_prob = field<double>(j, "prior_prob", where);
  spec.effect = prior_from_json(field<json>(j, "effect", where));
  spec.heterogeneity = prior_from_json(field<json>(j, "heterogeneity", where));
  try {
    spec.bias = bias_kind_from_string(field<std::string>(j, "bias", where));
  } catch (const ValidationError& e) {
    throw ParseError(where + ": " + e.what());
  }
  if (j.contains("selection")) {
    const auto& sel = j.at("selection");
    Sidedness side;
    try {
      side = sidedness_from_string(field<std::string>(sel, "side", where));
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    spec.selection = Cutpoints::make(side, field<std::vector<double>>(sel, "alphas", where));
    spec.omega_concentration = j.contains("omega_concentration")
                                   ? field<std::vector<double>>(j, "omega_concentration", where)
                                   : std::vector<double>(spec.selection->intervals(), 1.0);
  }
  if (j.contains("slope")) spec.slope = prior_from_json(j.at("slope"));
  spec.validate();
  return spec;
}

json model_space_to_json(const ModelSpace& space) {
  json models = json::array();
  for (const auto& s : space.specs) models.push_back(spec_to_json(s));
  return json{{"models", std::move(models)}};
}

ModelSpace model_space_from_json(const json& j) {
  const auto models = field<json>(j, "models", "model space");
  if (!models.is_array()) throw ParseError("model space: 'models' must be an array");
  ModelSpace space;
  for (const auto& m : models) space.specs.push_back(spec_from_json(m));
  space.validate();
  return space;
}

ModelSpace read_model_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model-space file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("model-space file '" + path.string() + "': " + e.what());
  }
  return model_space_from_json(j);
}

std::string write_model_space(const ModelSpace& space) { return model_space_to_json(space).dump(2) + "\n"; }

}  // namespace zcurve
