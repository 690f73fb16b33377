#include "herit/transform.hpp"

#include <cmath>

namespace herit {

Eigen::VectorXd weights_from_logits(const Eigen::VectorXd& logits, int m) {
  Eigen::VectorXd p(m);
  p(0) = 0.0;
  p.tail(m - 1) = logits;
  const double top = p.maxCoeff();
  p = (p.array() - top).exp();
  p /= p.sum();
  return p;
}

Eigen::VectorXd logits_from_weights(const Eigen::VectorXd& weights) {
  const int m = static_cast<int>(weights.size());
  Eigen::VectorXd logits(m - 1);
  for (int k = 1; k < m; ++k) logits(k - 1) = std::log(weights(k) / weights(0));
  return logits;
}

namespace {

void check_finite(const Eigen::VectorXd& theta) {
  if (!theta.allFinite()) throw model_error("non-finite parameter vector");
}

}  // namespace

ParamVector to_unconstrained(const TwinJointModel& model) {
  const int m = model.size();
  ParamVector theta;
  theta.m = m;
  theta.design = FamilyDesign::twins;
  theta.values.resize(5 * m - 1);
  Eigen::VectorXd weights(m);
  for (int k = 0; k < m; ++k) {
    const auto& c = model.components[k];
    theta.values(k) = c.mean;
    theta.values(m + k) = std::log(c.sd);
    theta.values(2 * m + k) = std::atanh(c.rho_mz);
    theta.values(3 * m + k) = std::atanh(c.rho_dz);
    weights(k) = c.weight;
  }
  if (m > 1) theta.values.tail(m - 1) = logits_from_weights(weights);
  return theta;
}

ParamVector to_unconstrained(const TrioMixture& model) {
  const int m = model.size();
  ParamVector theta;
  theta.m = m;
  theta.design = FamilyDesign::trios;
  theta.values.resize(6 * m - 1);
  Eigen::VectorXd weights(m);
  for (int k = 0; k < m; ++k) {
    const auto& c = model.components[k];
    theta.values(k) = c.mean;
    theta.values(m + k) = std::log(c.sd);
    theta.values(2 * m + k) = std::atanh(c.rho_mf);
    theta.values(3 * m + k) = std::atanh(c.rho_mc);
    theta.values(4 * m + k) = std::atanh(c.rho_fc);
    weights(k) = c.weight;
  }
  if (m > 1) theta.values.tail(m - 1) = logits_from_weights(weights);
  return theta;
}

TwinJointModel to_natural_twins(const ParamVector& theta) {
  if (theta.design != FamilyDesign::twins || theta.values.size() != theta.q())
    throw model_error("parameter vector does not describe a twin model");
  check_finite(theta.values);
  const int m = theta.m;
  const Eigen::VectorXd p =
      m > 1 ? weights_from_logits(theta.values.tail(m - 1), m)
            : Eigen::VectorXd::Ones(1);
  TwinJointModel model;
  model.components.resize(m);
  for (int k = 0; k < m; ++k) {
    auto& c = model.components[k];
    c.weight = p(k);
    c.mean = theta.values(k);
    c.sd = std::exp(theta.values(m + k));
    c.rho_mz = std::tanh(theta.values(2 * m + k));
    c.rho_dz = std::tanh(theta.values(3 * m + k));
  }
  canonicalize(model);
  return model;
}

TrioMixture to_natural_trios(const ParamVector& theta) {
  if (theta.design != FamilyDesign::trios || theta.values.size() != theta.q())
    throw model_error("parameter vector does not describe a trio model");
  check_finite(theta.values);
  const int m = theta.m;
  const Eigen::VectorXd p =
      m > 1 ? weights_from_logits(theta.values.tail(m - 1), m)
            : Eigen::VectorXd::Ones(1);
  TrioMixture model;
  model.components.resize(m);
  for (int k = 0; k < m; ++k) {
    auto& c = model.components[k];
    c.weight = p(k);
    c.mean = theta.values(k);
    c.sd = std::exp(theta.values(m + k));
    c.rho_mf = std::tanh(theta.values(2 * m + k));
    c.rho_mc = std::tanh(theta.values(3 * m + k));
    c.rho_fc = std::tanh(theta.values(4 * m + k));
  }
  canonicalize(model);
  return model;
}

}  // namespace herit
