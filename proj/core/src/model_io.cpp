#include "protogauss/model_io.hpp"

#include <algorithm>

#include <json.hpp>

#include "protogauss/errors.hpp"

namespace protogauss {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormat = "protogauss-model";
constexpr int kVersion = 1;

json gaussian_to_json(const DiagGaussian& g) {
  return json{{"mean", g.mean}, {"var", g.var}};
}

DiagGaussian gaussian_from_json(const json& j) {
  DiagGaussian g;
  g.mean = j.at("mean").get<std::vector<double>>();
  g.var = j.at("var").get<std::vector<double>>();
  if (g.mean.size() != g.var.size())
    throw ParseError("model: mean/var length mismatch");
  return g;
}

}  // namespace

std::string save_model(const FittedModel& model) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["config"] = json{{"seed", model.config.seed},
                     {"burn_in_samples", model.config.burn_in_samples},
                     {"kept_samples", model.config.kept_samples},
                     {"thin_iterations", model.config.thin_iterations},
                     {"mode", to_string(model.config.mode)},
                     {"kappa", model.config.kappa},
                     {"eta", model.config.eta},
                     {"variance_floor", model.config.variance_floor}};
  j["dim"] = model.dim;

  json concepts = json::array();
  for (std::size_t c = 0; c < model.size(); ++c) {
    const ConceptPosterior& cp = model.posterior.concepts[c];
    json samples = json::array();
    for (const DiagGaussian& g : cp.samples) samples.push_back(gaussian_to_json(g));
    concepts.push_back(json{{"expr", model.renderings[c]},
                            {"lambda", cp.lambda},
                            {"scorable", cp.scorable},
                            {"samples", std::move(samples)}});
  }
  j["concepts"] = std::move(concepts);

  json roles = json::object();
  for (const auto& [name, rg] : model.roles)
    roles[name] = json{{"support", rg.support},
                       {"mean", rg.gaussian.mean},
                       {"var", rg.gaussian.var}};
  j["roles"] = std::move(roles);
  return j.dump(2) + "\n";
}

FittedModel load_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat)
      throw ParseError("model: unrecognized format");
    if (j.at("version").get<int>() != kVersion)
      throw ParseError("model: unsupported version");

    FittedModel model;
    const json& config = j.at("config");
    model.config.seed = config.at("seed").get<std::uint64_t>();
    model.config.burn_in_samples = config.at("burn_in_samples").get<int>();
    model.config.kept_samples = config.at("kept_samples").get<int>();
    model.config.thin_iterations = config.at("thin_iterations").get<int>();
    const auto mode =
        prior_mode_from_string(config.at("mode").get<std::string>());
    if (!mode) throw ParseError("model: unknown prior mode");
    model.config.mode = *mode;
    model.config.kappa = config.at("kappa").get<int>();
    model.config.eta = config.at("eta").get<double>();
    model.config.variance_floor = config.at("variance_floor").get<double>();
    model.dim = j.at("dim").get<int>();

    for (const json& entry : j.at("concepts")) {
      model.renderings.push_back(entry.at("expr").get<std::string>());
      ConceptPosterior cp;
      cp.lambda = entry.at("lambda").get<double>();
      cp.scorable = entry.at("scorable").get<bool>();
      for (const json& sample : entry.at("samples"))
        cp.samples.push_back(gaussian_from_json(sample));
      model.posterior.concepts.push_back(std::move(cp));
    }
    if (!std::is_sorted(model.renderings.begin(), model.renderings.end()))
      throw ParseError("model: concepts out of order");

    for (const auto& [name, entry] : j.at("roles").items()) {
      RoleGaussian rg;
      rg.role = name;
      rg.support = entry.at("support").get<std::size_t>();
      rg.gaussian = gaussian_from_json(entry);
      model.roles.emplace(name, std::move(rg));
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

}  // namespace protogauss
