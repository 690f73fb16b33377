#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "herit/fit.hpp"
#include "herit/mixture.hpp"

namespace herit {

nlohmann::json model_to_json(const BivariateMixture& model);
nlohmann::json model_to_json(const TwinJointModel& model);
nlohmann::json model_to_json(const TrioMixture& model);

/// Full-precision fit artifact. Besides the fitted model it carries the
/// criteria, the Hessian and the data quantiles so downstream commands can
/// resume without the original data.
nlohmann::json fit_to_json(
    const FitResult& fit,
    const std::vector<std::pair<std::string, double>>& se,
    std::optional<std::pair<double, double>> data_quantiles);

/// A parsed model document: any JSON with "design" and "components", which a
/// fit artifact satisfies. Exactly one of the three models is populated.
struct ModelDocument {
  std::string design;  // "twins" | "trios" | "bivariate"
  TwinJointModel twins;
  TrioMixture trios;
  BivariateMixture pair;
};

ModelDocument model_from_json(const nlohmann::json& j);

/// Rebuilds a FitResult from a fit artifact (model, criteria, Hessian,
/// sample sizes). Start diagnostics are not round-tripped.
FitResult fit_from_json(const nlohmann::json& j);

std::optional<std::pair<double, double>> data_quantiles_from_json(
    const nlohmann::json& j);

}  // namespace herit
