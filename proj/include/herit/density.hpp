#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "herit/errors.hpp"
#include "herit/mixture.hpp"

namespace herit {

namespace constants {
inline constexpr double log_two_pi = 1.8378770664093454836;
inline constexpr double two_pi = 6.2831853071795864769;
}  // namespace constants

// ---------------------------------------------------------------------------
// Closed-form Gaussian log-densities for d = 1, 2, 3.
// Determinants and inverses are written out explicitly; a generic
// decomposition-based evaluator exists only as a test oracle.
// ---------------------------------------------------------------------------

template <typename Scalar>
Scalar log_gaussian_density(Scalar y, Scalar mu, Scalar variance) {
  if (!(variance > Scalar(0)))
    throw definiteness_error("1x1 covariance must be positive");
  const Scalar r = y - mu;
  return Scalar(-0.5) * (Scalar(constants::log_two_pi) + std::log(variance) +
                         r * r / variance);
}

template <typename Scalar>
Scalar log_gaussian_density(const Eigen::Matrix<Scalar, 2, 1>& y,
                            const Eigen::Matrix<Scalar, 2, 1>& mu,
                            const Eigen::Matrix<Scalar, 2, 2>& sigma) {
  const Scalar a = sigma(0, 0), b = sigma(0, 1), c = sigma(1, 1);
  const Scalar det = a * c - b * b;
  if (!(a > Scalar(0)) || !(det > Scalar(0)))
    throw definiteness_error("2x2 covariance is not positive definite");
  const Scalar u = y(0) - mu(0);
  const Scalar v = y(1) - mu(1);
  // quadratic form via the adjugate; u*u + v*v keeps the expression
  // symmetric in (u, v) bit for bit when a == c
  const Scalar quad = (c * (u * u) + a * (v * v) - Scalar(2) * b * (u * v)) / det;
  return Scalar(-1) * Scalar(constants::log_two_pi) -
         Scalar(0.5) * std::log(det) - Scalar(0.5) * quad;
}

template <typename Scalar>
Scalar log_gaussian_density(const Eigen::Matrix<Scalar, 3, 1>& y,
                            const Eigen::Matrix<Scalar, 3, 1>& mu,
                            const Eigen::Matrix<Scalar, 3, 3>& sigma) {
  const Scalar a = sigma(0, 0), b = sigma(0, 1), c = sigma(0, 2);
  const Scalar d = sigma(1, 1), e = sigma(1, 2), f = sigma(2, 2);
  const Scalar det = a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c);
  if (!(a > Scalar(0)) || !(a * d - b * b > Scalar(0)) || !(det > Scalar(0)))
    throw definiteness_error("3x3 covariance is not positive definite");
  // adjugate of the symmetric matrix
  const Scalar A00 = d * f - e * e;
  const Scalar A01 = c * e - b * f;
  const Scalar A02 = b * e - c * d;
  const Scalar A11 = a * f - c * c;
  const Scalar A12 = b * c - a * e;
  const Scalar A22 = a * d - b * b;
  const Scalar r0 = y(0) - mu(0), r1 = y(1) - mu(1), r2 = y(2) - mu(2);
  const Scalar quad = (A00 * r0 * r0 + A11 * r1 * r1 + A22 * r2 * r2 +
                       Scalar(2) * (A01 * r0 * r1 + A02 * r0 * r2 + A12 * r1 * r2)) /
                      det;
  return Scalar(-1.5) * Scalar(constants::log_two_pi) -
         Scalar(0.5) * std::log(det) - Scalar(0.5) * quad;
}

template <typename Scalar>
Scalar gaussian_density(Scalar y, Scalar mu, Scalar variance) {
  return std::exp(log_gaussian_density(y, mu, variance));
}

template <typename Scalar, int D>
Scalar gaussian_density(const Eigen::Matrix<Scalar, D, 1>& y,
                        const Eigen::Matrix<Scalar, D, 1>& mu,
                        const Eigen::Matrix<Scalar, D, D>& sigma) {
  static_assert(D == 2 || D == 3, "closed forms cover d = 1, 2, 3 only");
  return std::exp(log_gaussian_density(y, mu, sigma));
}

/// Dynamic-size entry point dispatching on dimension 1, 2 or 3.
template <typename Scalar>
Scalar gaussian_density(const VectorX<Scalar>& y, const VectorX<Scalar>& mu,
                        const MatrixX<Scalar>& sigma) {
  const Eigen::Index d = y.size();
  if (mu.size() != d || sigma.rows() != d || sigma.cols() != d)
    throw model_error("gaussian_density: inconsistent dimensions");
  switch (d) {
    case 1:
      return gaussian_density(y(0), mu(0), sigma(0, 0));
    case 2:
      return gaussian_density<Scalar, 2>(y.template head<2>(), mu.template head<2>(),
                                         sigma.template topLeftCorner<2, 2>());
    case 3:
      return gaussian_density<Scalar, 3>(y.template head<3>(), mu.template head<3>(),
                                         sigma.template topLeftCorner<3, 3>());
    default:
      throw model_error("gaussian_density supports d in {1, 2, 3}");
  }
}

// ---------------------------------------------------------------------------
// Mixture densities
// ---------------------------------------------------------------------------

/// Per-component weighted log-densities log[p_k phi_1(y; mu_k, sd_k^2)] of the
/// shared marginal.
template <typename Scalar>
VectorX<Scalar> log_component_densities(const BivariateMixtureT<Scalar>& model,
                                        Scalar y) {
  VectorX<Scalar> out(model.size());
  for (int k = 0; k < model.size(); ++k) {
    const auto& c = model.components[k];
    out(k) = std::log(c.weight) +
             log_gaussian_density(y, c.mean, c.sd * c.sd);
  }
  return out;
}

/// Marginal density g(y) = sum_k p_k phi_1(y; mu_k, sd_k^2). Both coordinates
/// of an exchangeable pair share it.
template <typename Scalar>
Scalar marginal_density(const BivariateMixtureT<Scalar>& model, Scalar y) {
  Scalar total(0);
  for (const auto& c : model.components)
    total += c.weight * gaussian_density(y, c.mean, c.sd * c.sd);
  return total;
}

/// Joint density of an exchangeable pair.
template <typename Scalar>
Scalar pair_density(const BivariateMixtureT<Scalar>& model, Scalar y1, Scalar y2) {
  Eigen::Matrix<Scalar, 2, 1> y;
  y << y1, y2;
  Scalar total(0);
  for (const auto& c : model.components) {
    Eigen::Matrix<Scalar, 2, 1> mu;
    mu << c.mean, c.mean;
    total += c.weight *
             gaussian_density<Scalar, 2>(y, mu, pair_covariance(c.sd, c.rho));
  }
  return total;
}

/// Joint density of a (mother, father, child) triple.
template <typename Scalar>
Scalar trio_density(const TrioMixtureT<Scalar>& model,
                    const Eigen::Matrix<Scalar, 3, 1>& y) {
  Scalar total(0);
  for (const auto& c : model.components) {
    Eigen::Matrix<Scalar, 3, 1> mu;
    mu << c.mean, c.mean, c.mean;
    total += c.weight * gaussian_density<Scalar, 3>(y, mu, trio_covariance(c));
  }
  return total;
}

}  // namespace herit
