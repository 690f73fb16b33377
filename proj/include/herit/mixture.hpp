#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "herit/errors.hpp"

namespace herit {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Family relationships a correlation parameter can belong to.
/// `pair` is the label of a generic exchangeable pair.
enum class Relationship { mz, dz, mc, fc, mf, pair };

inline std::string to_string(Relationship r) {
  switch (r) {
    case Relationship::mz: return "MZ";
    case Relationship::dz: return "DZ";
    case Relationship::mc: return "MC";
    case Relationship::fc: return "FC";
    case Relationship::mf: return "MF";
    case Relationship::pair: return "pair";
  }
  return "?";
}

inline Relationship relationship_from_string(const std::string& s) {
  if (s == "MZ" || s == "mz") return Relationship::mz;
  if (s == "DZ" || s == "dz") return Relationship::dz;
  if (s == "MC" || s == "mc") return Relationship::mc;
  if (s == "FC" || s == "fc") return Relationship::fc;
  if (s == "MF" || s == "mf") return Relationship::mf;
  if (s == "pair") return Relationship::pair;
  throw model_error("unknown relationship label: " + s);
}

// ---------------------------------------------------------------------------
// Components
// ---------------------------------------------------------------------------

/// One component of an exchangeable bivariate mixture: both coordinates share
/// the mean and the spread, and a single correlation ties them together.
template <typename Scalar = double>
struct BivariateComponent {
  Scalar weight{};
  Scalar mean{};
  Scalar sd{};
  Scalar rho{};
};

/// Twin component: the marginal parameters are shared between zygosities,
/// only the correlation differs.
template <typename Scalar = double>
struct TwinComponent {
  Scalar weight{};
  Scalar mean{};
  Scalar sd{};
  Scalar rho_mz{};
  Scalar rho_dz{};
};

/// Trio component in (mother, father, child) order with one correlation per
/// pairing.
template <typename Scalar = double>
struct TrioComponent {
  Scalar weight{};
  Scalar mean{};
  Scalar sd{};
  Scalar rho_mf{};
  Scalar rho_mc{};
  Scalar rho_fc{};
};

/// 2x2 covariance of a bivariate component.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> pair_covariance(Scalar sd, Scalar rho) {
  const Scalar v = sd * sd;
  Eigen::Matrix<Scalar, 2, 2> sigma;
  sigma << v, v * rho, v * rho, v;
  return sigma;
}

/// 3x3 covariance of a trio component, rows/columns in
/// (mother, father, child) order.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> trio_covariance(const TrioComponent<Scalar>& c) {
  const Scalar v = c.sd * c.sd;
  Eigen::Matrix<Scalar, 3, 3> sigma;
  sigma << v, v * c.rho_mf, v * c.rho_mc,
           v * c.rho_mf, v, v * c.rho_fc,
           v * c.rho_mc, v * c.rho_fc, v;
  return sigma;
}

/// Determinant of the trio correlation matrix; positive iff the component
/// covariance is positive definite (the pairwise |rho| < 1 checks supply the
/// leading minors).
template <typename Scalar>
Scalar trio_correlation_determinant(const TrioComponent<Scalar>& c) {
  const Scalar a = c.rho_mf, b = c.rho_mc, d = c.rho_fc;
  return Scalar(1) + Scalar(2) * a * b * d - a * a - b * b - d * d;
}

// ---------------------------------------------------------------------------
// Mixtures
// ---------------------------------------------------------------------------

/// Exchangeable bivariate Gaussian mixture carrying a single relationship
/// label. Components are kept in canonical order: ascending spread, ties
/// broken by ascending mean.
template <typename Scalar = double>
struct BivariateMixtureT {
  std::vector<BivariateComponent<Scalar>> components;
  Relationship relationship = Relationship::pair;

  int size() const { return static_cast<int>(components.size()); }
};

/// Trivariate mother-father-child mixture.
template <typename Scalar = double>
struct TrioMixtureT {
  std::vector<TrioComponent<Scalar>> components;

  int size() const { return static_cast<int>(components.size()); }
};

/// Joint model for both zygosities: one set of weights, means and spreads,
/// with per-component MZ and DZ correlations.
template <typename Scalar = double>
struct TwinJointModelT {
  std::vector<TwinComponent<Scalar>> components;

  int size() const { return static_cast<int>(components.size()); }
};

using BivariateMixture = BivariateMixtureT<double>;
using TrioMixture = TrioMixtureT<double>;
using TwinJointModel = TwinJointModelT<double>;

namespace detail {

template <typename Component>
void sort_canonically(std::vector<Component>& components) {
  std::stable_sort(components.begin(), components.end(),
                   [](const Component& a, const Component& b) {
                     if (a.sd != b.sd) return a.sd < b.sd;
                     return a.mean < b.mean;
                   });
}

template <typename Scalar, typename Component>
void check_common(const std::vector<Component>& components) {
  if (components.empty()) throw model_error("mixture has no components");
  Scalar total(0);
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& c = components[k];
    const std::string tag = " (component " + std::to_string(k + 1) + ")";
    if (!(c.sd > Scalar(0)) || !std::isfinite(static_cast<double>(c.sd)))
      throw model_error("spread must be strictly positive" + tag);
    if (!(c.weight > Scalar(0)) || c.weight > Scalar(1))
      throw model_error("weight must lie in (0, 1]" + tag);
    if (!std::isfinite(static_cast<double>(c.mean)))
      throw model_error("mean must be finite" + tag);
    total += c.weight;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-12)
    throw model_error("weights must sum to 1 within 1e-12");
  for (std::size_t k = 1; k < components.size(); ++k) {
    const auto& a = components[k - 1];
    const auto& b = components[k];
    if (a.sd > b.sd || (a.sd == b.sd && a.mean > b.mean))
      throw model_error("components are not in canonical order");
  }
}

template <typename Scalar>
void check_rho(Scalar rho, const char* label, std::size_t k) {
  if (!(rho > Scalar(-1)) || !(rho < Scalar(1)))
    throw model_error(std::string("correlation ") + label +
                      " must lie strictly inside (-1, 1) (component " +
                      std::to_string(k + 1) + ")");
}

}  // namespace detail

template <typename Scalar>
void canonicalize(BivariateMixtureT<Scalar>& model) {
  detail::sort_canonically(model.components);
}
template <typename Scalar>
void canonicalize(TrioMixtureT<Scalar>& model) {
  detail::sort_canonically(model.components);
}
template <typename Scalar>
void canonicalize(TwinJointModelT<Scalar>& model) {
  detail::sort_canonically(model.components);
}

/// Throws model_error unless all structural invariants hold.
template <typename Scalar>
void validate(const BivariateMixtureT<Scalar>& model) {
  detail::check_common<Scalar>(model.components);
  for (std::size_t k = 0; k < model.components.size(); ++k)
    detail::check_rho(model.components[k].rho, "rho", k);
}

template <typename Scalar>
void validate(const TwinJointModelT<Scalar>& model) {
  detail::check_common<Scalar>(model.components);
  for (std::size_t k = 0; k < model.components.size(); ++k) {
    detail::check_rho(model.components[k].rho_mz, "rho_MZ", k);
    detail::check_rho(model.components[k].rho_dz, "rho_DZ", k);
  }
}

template <typename Scalar>
void validate(const TrioMixtureT<Scalar>& model) {
  detail::check_common<Scalar>(model.components);
  for (std::size_t k = 0; k < model.components.size(); ++k) {
    const auto& c = model.components[k];
    detail::check_rho(c.rho_mf, "rho_MF", k);
    detail::check_rho(c.rho_mc, "rho_MC", k);
    detail::check_rho(c.rho_fc, "rho_FC", k);
    if (!(trio_correlation_determinant(c) > Scalar(0)))
      throw definiteness_error("trio component covariance is not positive definite (component " +
                               std::to_string(k + 1) + ")");
  }
}

// ---------------------------------------------------------------------------
// Margins
// ---------------------------------------------------------------------------

/// The bivariate mixture implied by one zygosity of a twin model.
template <typename Scalar>
BivariateMixtureT<Scalar> bivariate_margin(const TwinJointModelT<Scalar>& model,
                                           Relationship zygosity) {
  if (zygosity != Relationship::mz && zygosity != Relationship::dz)
    throw model_error("twin margin requires relationship MZ or DZ");
  BivariateMixtureT<Scalar> out;
  out.relationship = zygosity;
  out.components.reserve(model.components.size());
  for (const auto& c : model.components)
    out.components.push_back({c.weight, c.mean, c.sd,
                              zygosity == Relationship::mz ? c.rho_mz : c.rho_dz});
  canonicalize(out);
  return out;
}

/// Integrates a trio mixture down to the bivariate mixture of one pairing.
/// Weights, means and spreads carry over; only the selected correlation is
/// kept.
template <typename Scalar>
BivariateMixtureT<Scalar> trio_pair_margin(const TrioMixtureT<Scalar>& model,
                                           Relationship relationship) {
  BivariateMixtureT<Scalar> out;
  out.relationship = relationship;
  out.components.reserve(model.components.size());
  for (const auto& c : model.components) {
    Scalar rho;
    switch (relationship) {
      case Relationship::mc: rho = c.rho_mc; break;
      case Relationship::fc: rho = c.rho_fc; break;
      case Relationship::mf: rho = c.rho_mf; break;
      default:
        throw model_error("trio margin requires relationship MC, FC or MF");
    }
    out.components.push_back({c.weight, c.mean, c.sd, rho});
  }
  canonicalize(out);
  return out;
}

}  // namespace herit
