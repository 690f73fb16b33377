#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "herit/mixture.hpp"

namespace herit {

/// The two family designs the estimation layer fits.
enum class FamilyDesign { twins, trios };

inline std::string to_string(FamilyDesign d) {
  return d == FamilyDesign::twins ? "twins" : "trios";
}

inline FamilyDesign family_design_from_string(const std::string& s) {
  if (s == "twins") return FamilyDesign::twins;
  if (s == "trios") return FamilyDesign::trios;
  throw model_error("unknown design: " + s);
}

/// Number of free parameters: 5m-1 for twins, 6m-1 for trios.
inline int parameter_count(FamilyDesign design, int m) {
  return design == FamilyDesign::twins ? 5 * m - 1 : 6 * m - 1;
}

/// Unconstrained parameter vector together with its bijection metadata.
///
/// Layout (twins, length 5m-1):
///   [ mu_1..m | log sd_1..m | atanh rho_MZ_1..m | atanh rho_DZ_1..m | w_2..m ]
/// Layout (trios, length 6m-1):
///   [ mu | log sd | atanh rho_MF | atanh rho_MC | atanh rho_FC | w_2..m ]
/// Weights use a multinomial logit with component 1 as the reference:
/// p_k = exp(w_k) / (1 + sum_j exp(w_j)), w_1 = 0.
struct ParamVector {
  Eigen::VectorXd values;
  int m = 0;
  FamilyDesign design = FamilyDesign::twins;

  int q() const { return parameter_count(design, m); }
};

ParamVector to_unconstrained(const TwinJointModel& model);
ParamVector to_unconstrained(const TrioMixture& model);

/// Inverse maps. Both re-apply the canonical component ordering, so a
/// round trip starting from a canonically ordered model is the identity.
TwinJointModel to_natural_twins(const ParamVector& theta);
TrioMixture to_natural_trios(const ParamVector& theta);

/// Weight block helpers shared by the transforms and the likelihood.
Eigen::VectorXd weights_from_logits(const Eigen::VectorXd& logits, int m);
Eigen::VectorXd logits_from_weights(const Eigen::VectorXd& weights);

}  // namespace herit
