#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>

#include "herit/density.hpp"
#include "herit/mixture.hpp"

namespace herit {

/// Marginal mean and variance of the mixture plus the global correlation per
/// relationship label.
template <typename Scalar = double>
struct GlobalMomentsT {
  Scalar mean{};
  Scalar variance{};
  std::map<Relationship, Scalar> rho;

  Scalar sd() const { return std::sqrt(variance); }
};

using GlobalMoments = GlobalMomentsT<double>;

namespace detail {

// mu = sum p_k mu_k,  sigma^2 = sum p_k [sd_k^2 + (mu_k - mu)^2]
template <typename Scalar, typename Component>
void marginal_mean_variance(const std::vector<Component>& components,
                            Scalar& mean, Scalar& variance) {
  mean = Scalar(0);
  for (const auto& c : components) mean += c.weight * c.mean;
  variance = Scalar(0);
  for (const auto& c : components) {
    const Scalar d = c.mean - mean;
    variance += c.weight * (c.sd * c.sd + d * d);
  }
}

// rho = sigma^-2 sum p_k [rho_k sd_k^2 + (mu_k - mu)^2]
template <typename Scalar, typename Component, typename RhoOf>
Scalar global_correlation(const std::vector<Component>& components, Scalar mean,
                          Scalar variance, RhoOf rho_of) {
  Scalar num(0);
  for (const auto& c : components) {
    const Scalar d = c.mean - mean;
    num += c.weight * (rho_of(c) * c.sd * c.sd + d * d);
  }
  return num / variance;
}

}  // namespace detail

template <typename Scalar>
GlobalMomentsT<Scalar> global_moments(const BivariateMixtureT<Scalar>& model) {
  GlobalMomentsT<Scalar> g;
  detail::marginal_mean_variance(model.components, g.mean, g.variance);
  g.rho[model.relationship] = detail::global_correlation(
      model.components, g.mean, g.variance,
      [](const BivariateComponent<Scalar>& c) { return c.rho; });
  return g;
}

template <typename Scalar>
GlobalMomentsT<Scalar> global_moments(const TwinJointModelT<Scalar>& model) {
  GlobalMomentsT<Scalar> g;
  detail::marginal_mean_variance(model.components, g.mean, g.variance);
  g.rho[Relationship::mz] = detail::global_correlation(
      model.components, g.mean, g.variance,
      [](const TwinComponent<Scalar>& c) { return c.rho_mz; });
  g.rho[Relationship::dz] = detail::global_correlation(
      model.components, g.mean, g.variance,
      [](const TwinComponent<Scalar>& c) { return c.rho_dz; });
  return g;
}

template <typename Scalar>
GlobalMomentsT<Scalar> global_moments(const TrioMixtureT<Scalar>& model) {
  GlobalMomentsT<Scalar> g;
  detail::marginal_mean_variance(model.components, g.mean, g.variance);
  g.rho[Relationship::mc] = detail::global_correlation(
      model.components, g.mean, g.variance,
      [](const TrioComponent<Scalar>& c) { return c.rho_mc; });
  g.rho[Relationship::fc] = detail::global_correlation(
      model.components, g.mean, g.variance,
      [](const TrioComponent<Scalar>& c) { return c.rho_fc; });
  g.rho[Relationship::mf] = detail::global_correlation(
      model.components, g.mean, g.variance,
      [](const TrioComponent<Scalar>& c) { return c.rho_mf; });
  return g;
}

/// Posterior component probabilities p_k*(y) given one observed coordinate,
/// evaluated in log space so extreme y stay well defined.
template <typename Scalar>
VectorX<Scalar> posterior_weights(const BivariateMixtureT<Scalar>& model, Scalar y) {
  VectorX<Scalar> lg = log_component_densities(model, y);
  const Scalar top = lg.maxCoeff();
  VectorX<Scalar> w = (lg.array() - top).exp();
  w /= w.sum();
  return w;
}

/// Conditional quantities of one coordinate given the other equals y.
template <typename Scalar = double>
struct LocalMomentsT {
  Scalar y{};
  VectorX<Scalar> posterior;             // p_k*(y)
  Scalar mean{};                         // E(Y1 | Y2 = y)
  Scalar variance{};                     // Var(Y1 | Y2 = y)
  Scalar slope{};                        // beta(y) = d/dy E(Y1 | Y2 = y)
  VectorX<Scalar> log_density_derivative;  // d_k(y) = -(y - mu_k)/sd_k^2
};

using LocalMoments = LocalMomentsT<double>;

template <typename Scalar>
LocalMomentsT<Scalar> local_moments(const BivariateMixtureT<Scalar>& model, Scalar y) {
  const int m = model.size();
  LocalMomentsT<Scalar> loc;
  loc.y = y;
  loc.posterior = posterior_weights(model, y);
  loc.log_density_derivative.resize(m);

  // component regression lines mu_k(y) = mu_k + rho_k (y - mu_k)
  VectorX<Scalar> line(m);
  for (int k = 0; k < m; ++k) {
    const auto& c = model.components[k];
    line(k) = c.mean + c.rho * (y - c.mean);
    loc.log_density_derivative(k) = -(y - c.mean) / (c.sd * c.sd);
  }

  loc.mean = loc.posterior.dot(line);

  loc.variance = Scalar(0);
  loc.slope = Scalar(0);
  for (int k = 0; k < m; ++k) {
    const auto& c = model.components[k];
    const Scalar centered = line(k) - loc.mean;
    loc.variance += loc.posterior(k) *
                    (c.sd * c.sd * (Scalar(1) - c.rho * c.rho) + centered * centered);
    loc.slope += loc.posterior(k) *
                 (c.rho + centered * loc.log_density_derivative(k));
  }
  return loc;
}

}  // namespace herit
