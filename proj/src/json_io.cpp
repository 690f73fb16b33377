#include "herit/json_io.hpp"

#include "herit/errors.hpp"
#include "herit/moments.hpp"

namespace herit {

using nlohmann::json;

namespace {

json global_block(const GlobalMoments& g) {
  json rho = json::object();
  for (const auto& [rel, value] : g.rho) rho[to_string(rel)] = value;
  return json{{"mu", g.mean}, {"sigma", g.sd()}, {"rho", rho}};
}

json hessian_to_json(const Eigen::MatrixXd& h) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < h.cols(); ++j) row.push_back(h(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd hessian_from_json(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows.at(i);
    if (static_cast<Eigen::Index>(row.size()) != n)
      throw data_error("hessian block is not square");
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = row.at(j).get<double>();
  }
  return h;
}

double number_at(const json& j, const char* key) {
  if (!j.contains(key))
    throw data_error(std::string("model document lacks key '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

json model_to_json(const BivariateMixture& model) {
  json components = json::array();
  for (const auto& c : model.components)
    components.push_back(
        {{"p", c.weight}, {"mu", c.mean}, {"sigma", c.sd}, {"rho", c.rho}});
  return json{{"design", "bivariate"},
              {"relationship", to_string(model.relationship)},
              {"m", model.size()},
              {"components", components},
              {"global", global_block(global_moments(model))}};
}

json model_to_json(const TwinJointModel& model) {
  json components = json::array();
  for (const auto& c : model.components)
    components.push_back({{"p", c.weight},
                          {"mu", c.mean},
                          {"sigma", c.sd},
                          {"rho", {{"MZ", c.rho_mz}, {"DZ", c.rho_dz}}}});
  return json{{"design", "twins"},
              {"m", model.size()},
              {"components", components},
              {"global", global_block(global_moments(model))}};
}

json model_to_json(const TrioMixture& model) {
  json components = json::array();
  for (const auto& c : model.components)
    components.push_back(
        {{"p", c.weight},
         {"mu", c.mean},
         {"sigma", c.sd},
         {"rho", {{"MF", c.rho_mf}, {"MC", c.rho_mc}, {"FC", c.rho_fc}}}});
  return json{{"design", "trios"},
              {"m", model.size()},
              {"components", components},
              {"global", global_block(global_moments(model))}};
}

json fit_to_json(const FitResult& fit,
                 const std::vector<std::pair<std::string, double>>& se,
                 std::optional<std::pair<double, double>> data_quantiles) {
  json j = fit.design == FamilyDesign::twins ? model_to_json(fit.twins)
                                             : model_to_json(fit.trios);
  j["loglik"] = fit.loglik;
  j["Q"] = fit.q;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  j["n"] = fit.n_families;
  if (fit.design == FamilyDesign::twins) {
    j["n_mz"] = fit.n_mz;
    j["n_dz"] = fit.n_dz;
  }
  j["converged"] = fit.converged;
  j["seed"] = fit.seed;

  json se_block = json::object();
  for (const auto& [name, value] : se) se_block[name] = value;
  j["se"] = se_block;

  if (fit.hessian.size() > 0) j["hessian"] = hessian_to_json(fit.hessian);
  if (data_quantiles)
    j["data_quantiles"] = {{"q05", data_quantiles->first},
                           {"q95", data_quantiles->second}};

  json starts = json::array();
  for (const auto& s : fit.starts)
    starts.push_back({{"index", s.index},
                      {"value", s.value},
                      {"converged", s.converged},
                      {"iterations", s.iterations},
                      {"message", s.message}});
  j["starts"] = starts;
  return j;
}

ModelDocument model_from_json(const json& j) {
  if (!j.contains("design") || !j.contains("components"))
    throw data_error("model document needs 'design' and 'components'");
  ModelDocument doc;
  doc.design = j.at("design").get<std::string>();
  const json& comps = j.at("components");
  if (!comps.is_array() || comps.empty())
    throw data_error("model document has no components");

  if (doc.design == "twins") {
    for (const auto& c : comps) {
      const json& rho = c.at("rho");
      doc.twins.components.push_back({number_at(c, "p"), number_at(c, "mu"),
                                      number_at(c, "sigma"),
                                      number_at(rho, "MZ"), number_at(rho, "DZ")});
    }
    canonicalize(doc.twins);
    validate(doc.twins);
  } else if (doc.design == "trios") {
    for (const auto& c : comps) {
      const json& rho = c.at("rho");
      doc.trios.components.push_back({number_at(c, "p"), number_at(c, "mu"),
                                      number_at(c, "sigma"), number_at(rho, "MF"),
                                      number_at(rho, "MC"), number_at(rho, "FC")});
    }
    canonicalize(doc.trios);
    validate(doc.trios);
  } else if (doc.design == "bivariate") {
    if (j.contains("relationship"))
      doc.pair.relationship =
          relationship_from_string(j.at("relationship").get<std::string>());
    for (const auto& c : comps)
      doc.pair.components.push_back({number_at(c, "p"), number_at(c, "mu"),
                                     number_at(c, "sigma"), number_at(c, "rho")});
    canonicalize(doc.pair);
    validate(doc.pair);
  } else {
    throw data_error("unknown design '" + doc.design + "'");
  }
  return doc;
}

FitResult fit_from_json(const json& j) {
  const ModelDocument doc = model_from_json(j);
  FitResult fit;
  if (doc.design == "twins") {
    fit.design = FamilyDesign::twins;
    fit.twins = doc.twins;
    fit.m = fit.twins.size();
    if (j.contains("n_mz")) fit.n_mz = j.at("n_mz").get<Eigen::Index>();
    if (j.contains("n_dz")) fit.n_dz = j.at("n_dz").get<Eigen::Index>();
  } else if (doc.design == "trios") {
    fit.design = FamilyDesign::trios;
    fit.trios = doc.trios;
    fit.m = fit.trios.size();
  } else {
    throw data_error("fit artifacts must use design 'twins' or 'trios'");
  }
  fit.loglik = number_at(j, "loglik");
  fit.q = static_cast<int>(number_at(j, "Q"));
  fit.aic = number_at(j, "aic");
  fit.bic = number_at(j, "bic");
  fit.n_families = static_cast<Eigen::Index>(number_at(j, "n"));
  fit.converged = j.at("converged").get<bool>();
  fit.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("hessian")) fit.hessian = hessian_from_json(j.at("hessian"));
  return fit;
}

std::optional<std::pair<double, double>> data_quantiles_from_json(const json& j) {
  if (!j.contains("data_quantiles")) return std::nullopt;
  const json& q = j.at("data_quantiles");
  return std::make_pair(number_at(q, "q05"), number_at(q, "q95"));
}

}  // namespace herit
