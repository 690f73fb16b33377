#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "herit/moments.hpp"

namespace herit {

/// A curve evaluated on a grid, optionally with pointwise standard errors and
/// 95% bounds (filled in by the inference layer; empty otherwise).
template <typename Scalar = double>
struct CurveSeriesT {
  std::string name;
  VectorX<Scalar> y;
  VectorX<Scalar> value;
  VectorX<Scalar> se;     // empty unless bands were attached
  VectorX<Scalar> lower;
  VectorX<Scalar> upper;
};

using CurveSeries = CurveSeriesT<double>;

/// Correlation curve at a single point, given the global sd of the
/// conditioning coordinate (both marginals share it under exchangeability).
template <typename Scalar>
Scalar correlation_at(const BivariateMixtureT<Scalar>& model, Scalar y,
                      Scalar global_sd) {
  const LocalMomentsT<Scalar> loc = local_moments(model, y);
  const Scalar sb = global_sd * loc.slope;
  return sb / std::sqrt(sb * sb + loc.variance);
}

/// Default evaluation grid: equally spaced points on mean +- 4 sd.
template <typename Scalar>
VectorX<Scalar> default_grid(const GlobalMomentsT<Scalar>& global, int n = 201) {
  const Scalar lo = global.mean - Scalar(4) * global.sd();
  const Scalar hi = global.mean + Scalar(4) * global.sd();
  return VectorX<Scalar>::LinSpaced(n, lo, hi);
}

template <typename Scalar>
CurveSeriesT<Scalar> correlation_curve(const BivariateMixtureT<Scalar>& model,
                                       const VectorX<Scalar>& grid) {
  const Scalar sd = global_moments(model).sd();
  CurveSeriesT<Scalar> out;
  out.name = "rho_" + to_string(model.relationship);
  out.y = grid;
  out.value.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out.value(i) = correlation_at(model, grid(i), sd);
  return out;
}

// ---------------------------------------------------------------------------
// Tail behaviour
// ---------------------------------------------------------------------------

/// Case I: a unique largest component variance dominates both tails.
/// Case II: the largest variance is tied; the smallest tied mean dominates the
/// left tail and the largest the right.
enum class TailCase { one, two };

inline std::string to_string(TailCase c) { return c == TailCase::one ? "I" : "II"; }

template <typename Scalar = double>
struct TailLimitT {
  int dominant = 0;       // index K of the dominating component (0-based)
  Scalar slope{};         // lim beta(y) = rho_K
  Scalar variance{};      // lim sigma^2(y) = sd_K^2 (1 - rho_K^2)
  Scalar rho_tilde{};     // lim rho(y)
};

template <typename Scalar = double>
struct TailLimitsT {
  TailCase tail_case = TailCase::one;
  TailLimitT<Scalar> left;   // y -> -inf
  TailLimitT<Scalar> right;  // y -> +inf
};

using TailLimits = TailLimitsT<double>;

namespace detail {

template <typename Scalar>
TailLimitT<Scalar> tail_limit_for(const BivariateMixtureT<Scalar>& model, int k,
                                  Scalar global_variance) {
  const auto& c = model.components[k];
  TailLimitT<Scalar> t;
  t.dominant = k;
  t.slope = c.rho;
  t.variance = c.sd * c.sd * (Scalar(1) - c.rho * c.rho);
  t.rho_tilde = std::sqrt(global_variance) * c.rho /
                std::sqrt(global_variance * c.rho * c.rho + t.variance);
  return t;
}

}  // namespace detail

/// Limits of beta(y), sigma^2(y) and rho(y) in both tails. Expects a
/// canonically ordered model; spread ties are detected with a relative
/// tolerance of 1e-9 on the variances.
template <typename Scalar>
TailLimitsT<Scalar> tail_limits(const BivariateMixtureT<Scalar>& model) {
  validate(model);
  const int m = model.size();
  const Scalar top_var = model.components[m - 1].sd * model.components[m - 1].sd;

  // q = smallest index whose variance ties the largest one
  int q = m - 1;
  while (q > 0) {
    const Scalar var = model.components[q - 1].sd * model.components[q - 1].sd;
    if (std::abs(var - top_var) > Scalar(1e-9) * top_var) break;
    --q;
  }

  // among the tied components, the smallest mean rules the left tail and the
  // largest mean the right (coincides with indices q and m-1 when the
  // canonical order applies exactly)
  int left_k = q, right_k = q;
  for (int k = q + 1; k < m; ++k) {
    if (model.components[k].mean < model.components[left_k].mean) left_k = k;
    if (model.components[k].mean >= model.components[right_k].mean) right_k = k;
  }

  const Scalar global_variance = global_moments(model).variance;
  TailLimitsT<Scalar> out;
  out.tail_case = (q == m - 1) ? TailCase::one : TailCase::two;
  out.left = detail::tail_limit_for(model, left_k, global_variance);
  out.right = detail::tail_limit_for(model, right_k, global_variance);
  return out;
}

/// Between- to within-component variance ratio gamma = sigma_mu^2 / sd_0^2 for
/// an equal-spread mixture; the tail correlations then reduce to
/// rho sqrt((1+gamma)/(1+gamma rho^2)).
template <typename Scalar>
Scalar equal_spread_variance_ratio(const BivariateMixtureT<Scalar>& model) {
  Scalar mean(0);
  for (const auto& c : model.components) mean += c.weight * c.mean;
  Scalar sigma_mu2(0);
  for (const auto& c : model.components) {
    const Scalar d = c.mean - mean;
    sigma_mu2 += c.weight * d * d;
  }
  const Scalar sd0 = model.components.front().sd;
  return sigma_mu2 / (sd0 * sd0);
}

template <typename Scalar>
Scalar equal_spread_tail_correlation(Scalar rho, Scalar gamma) {
  return rho * std::sqrt((Scalar(1) + gamma) / (Scalar(1) + gamma * rho * rho));
}

}  // namespace herit
