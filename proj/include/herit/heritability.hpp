#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "herit/curves.hpp"
#include "herit/mixture.hpp"

namespace herit {

/// Which variance decomposition a result belongs to.
enum class DecompositionKind { twin_ace, twin_ade, trio_ace };

inline std::string to_string(DecompositionKind k) {
  switch (k) {
    case DecompositionKind::twin_ace: return "twin-ACE";
    case DecompositionKind::twin_ade: return "twin-ADE";
    case DecompositionKind::trio_ace: return "trio-ACE";
  }
  return "?";
}

/// Moment-based variance proportions. The inactive component is zero (d2 for
/// ACE, c2 for ADE). Values are reported as-is; moment estimators can leave
/// [0, 1].
template <typename Scalar = double>
struct ClassicalDecompositionT {
  Scalar a2{};
  Scalar c2{};
  Scalar d2{};
  Scalar e2{};
  DecompositionKind kind = DecompositionKind::twin_ace;
};

using ClassicalDecomposition = ClassicalDecompositionT<double>;

/// Falconer's solution of the ACE moment equations.
template <typename Scalar>
ClassicalDecompositionT<Scalar> falconer_ace(Scalar rho_mz, Scalar rho_dz) {
  ClassicalDecompositionT<Scalar> d;
  d.kind = DecompositionKind::twin_ace;
  d.a2 = Scalar(2) * (rho_mz - rho_dz);
  d.c2 = Scalar(2) * rho_dz - rho_mz;
  d.e2 = Scalar(1) - rho_mz;
  return d;
}

/// ADE moment solution for twins.
template <typename Scalar>
ClassicalDecompositionT<Scalar> ade_moments(Scalar rho_mz, Scalar rho_dz) {
  ClassicalDecompositionT<Scalar> d;
  d.kind = DecompositionKind::twin_ade;
  d.a2 = Scalar(4) * rho_dz - rho_mz;
  d.d2 = Scalar(2) * (rho_mz - Scalar(2) * rho_dz);
  d.e2 = Scalar(1) - rho_mz;
  return d;
}

/// ACE moment solution for mother-father-child trios.
template <typename Scalar>
ClassicalDecompositionT<Scalar> trio_ace(Scalar rho_mc, Scalar rho_fc) {
  ClassicalDecompositionT<Scalar> d;
  d.kind = DecompositionKind::trio_ace;
  d.a2 = Scalar(2) * rho_fc;
  d.c2 = rho_mc - rho_fc;
  d.e2 = Scalar(1) - rho_mc - rho_fc;
  return d;
}

template <typename Scalar = double>
struct ModelChoiceT {
  DecompositionKind kind = DecompositionKind::twin_ace;
  bool coincident = false;  // rho_mz == 2 rho_dz: ACE and ADE give the same fit
};

using ModelChoice = ModelChoiceT<double>;

/// The usual informal rule: ACE when rho_MZ < 2 rho_DZ, else ADE. Exact ties
/// (within 1e-12) go to ACE with the coincidence flag set.
template <typename Scalar>
ModelChoiceT<Scalar> model_choice(Scalar rho_mz, Scalar rho_dz) {
  ModelChoiceT<Scalar> choice;
  const Scalar diff = rho_mz - Scalar(2) * rho_dz;
  if (std::abs(diff) <= Scalar(1e-12)) {
    choice.kind = DecompositionKind::twin_ace;
    choice.coincident = true;
  } else {
    choice.kind = diff < Scalar(0) ? DecompositionKind::twin_ace
                                   : DecompositionKind::twin_ade;
  }
  return choice;
}

/// How the twin decomposition is selected when building curves.
enum class DesignRule { automatic, ace, ade };

/// Heritability curves on a grid. `second` is c2(y) under ACE and d2(y) under
/// ADE; with pointwise switching it follows `kind_at` per point.
template <typename Scalar = double>
struct HeritabilityCurvesT {
  DecompositionKind kind = DecompositionKind::twin_ace;
  VectorX<Scalar> grid;
  VectorX<Scalar> a2;
  VectorX<Scalar> second;
  VectorX<Scalar> e2;
  Eigen::VectorXi kind_at;        // only filled under pointwise switching
  bool has_negative_values = false;

  std::string second_name() const {
    return kind == DecompositionKind::twin_ade ? "d2" : "c2";
  }
};

using HeritabilityCurves = HeritabilityCurvesT<double>;

namespace detail {

template <typename Scalar>
void flag_negative(HeritabilityCurvesT<Scalar>& h) {
  h.has_negative_values = (h.a2.minCoeff() < Scalar(0)) ||
                          (h.second.minCoeff() < Scalar(0)) ||
                          (h.e2.minCoeff() < Scalar(0));
}

}  // namespace detail

/// Local ACE/ADE decomposition of the MZ and DZ correlation curves.
/// rule == automatic picks the decomposition once from the global
/// correlations; `pointwise_switch` instead re-applies the choice at every
/// grid point (continuous across switches since both solutions agree when
/// rho_MZ = 2 rho_DZ).
template <typename Scalar>
HeritabilityCurvesT<Scalar> heritability_curves_twins(
    const TwinJointModelT<Scalar>& model, const VectorX<Scalar>& grid,
    DesignRule rule = DesignRule::automatic, bool pointwise_switch = false) {
  if (grid.size() == 0) throw std::invalid_argument("empty evaluation grid");
  validate(model);

  const CurveSeriesT<Scalar> mz =
      correlation_curve(bivariate_margin(model, Relationship::mz), grid);
  const CurveSeriesT<Scalar> dz =
      correlation_curve(bivariate_margin(model, Relationship::dz), grid);

  DecompositionKind kind = DecompositionKind::twin_ace;
  switch (rule) {
    case DesignRule::ace: kind = DecompositionKind::twin_ace; break;
    case DesignRule::ade: kind = DecompositionKind::twin_ade; break;
    case DesignRule::automatic: {
      const GlobalMomentsT<Scalar> g = global_moments(model);
      kind = model_choice(g.rho.at(Relationship::mz), g.rho.at(Relationship::dz)).kind;
      break;
    }
  }

  HeritabilityCurvesT<Scalar> h;
  h.kind = kind;
  h.grid = grid;
  h.a2.resize(grid.size());
  h.second.resize(grid.size());
  h.e2.resize(grid.size());
  if (pointwise_switch) h.kind_at.resize(grid.size());

  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar rmz = mz.value(i), rdz = dz.value(i);
    DecompositionKind local = kind;
    if (pointwise_switch) {
      local = model_choice(rmz, rdz).kind;
      h.kind_at(i) = local == DecompositionKind::twin_ade ? 1 : 0;
    }
    const ClassicalDecompositionT<Scalar> dec =
        local == DecompositionKind::twin_ade ? ade_moments(rmz, rdz)
                                             : falconer_ace(rmz, rdz);
    h.a2(i) = dec.a2;
    h.second(i) = local == DecompositionKind::twin_ade ? dec.d2 : dec.c2;
    h.e2(i) = dec.e2;
  }
  detail::flag_negative(h);
  return h;
}

/// Local trio ACE decomposition built from the mother-child and father-child
/// correlation curves.
template <typename Scalar>
HeritabilityCurvesT<Scalar> heritability_curves_trio(
    const TrioMixtureT<Scalar>& model, const VectorX<Scalar>& grid) {
  if (grid.size() == 0) throw std::invalid_argument("empty evaluation grid");
  validate(model);

  const CurveSeriesT<Scalar> mc =
      correlation_curve(trio_pair_margin(model, Relationship::mc), grid);
  const CurveSeriesT<Scalar> fc =
      correlation_curve(trio_pair_margin(model, Relationship::fc), grid);

  HeritabilityCurvesT<Scalar> h;
  h.kind = DecompositionKind::trio_ace;
  h.grid = grid;
  h.a2.resize(grid.size());
  h.second.resize(grid.size());
  h.e2.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const ClassicalDecompositionT<Scalar> dec = trio_ace(mc.value(i), fc.value(i));
    h.a2(i) = dec.a2;
    h.second(i) = dec.c2;
    h.e2(i) = dec.e2;
  }
  detail::flag_negative(h);
  return h;
}

}  // namespace herit
