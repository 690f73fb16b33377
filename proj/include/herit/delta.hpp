#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "herit/curves.hpp"
#include "herit/fit.hpp"

namespace herit {

/// A differentiable functional of the unconstrained parameter vector; returns
/// one value per output (a scalar functional returns a length-1 vector, a
/// curve one value per grid point).
using ThetaFunctional =
    std::function<Eigen::VectorXd(const ParamVector& theta)>;

/// First-order (delta-method) standard errors of g(theta) at the fitted
/// optimum: se_j = sqrt(grad g_j' H^-1 grad g_j), with the functional
/// gradient taken by central differences in the unconstrained
/// parameterization. Throws inference_error when the Hessian is missing,
/// singular or indefinite.
Eigen::VectorXd delta_method_se(const FitResult& fit, const ThetaFunctional& g);

/// Attaches se and 95% bounds (estimate +- 1.96 se) to a curve.
CurveSeries with_bands(CurveSeries curve, const Eigen::VectorXd& se);

/// Flattened natural parameters of the fitted model with stable names
/// (mu_k, sigma_k, rho_<REL>_k, p_k).
std::vector<std::string> natural_parameter_names(FamilyDesign design, int m);
Eigen::VectorXd natural_parameters(const FitResult& fit);

/// Delta-method standard error for every natural parameter, aligned with
/// natural_parameter_names.
Eigen::VectorXd natural_parameter_se(const FitResult& fit);

}  // namespace herit
