#pragma once

#include <Eigen/Dense>

#include "herit/transform.hpp"

namespace herit {

/// Twin pairs by zygosity, one pair per row.
struct TwinData {
  Eigen::MatrixX2d mz;
  Eigen::MatrixX2d dz;

  Eigen::Index families() const { return mz.rows() + dz.rows(); }
};

/// Mother-father-child triples, one per row in that column order.
struct TrioData {
  Eigen::Matrix<double, Eigen::Dynamic, 3> values;

  Eigen::Index families() const { return values.rows(); }
};

/// Combined negative log-likelihood over both zygosities. The parameter
/// vector is evaluated as given (components are not reordered); the value is
/// invariant under component relabeling anyway.
double negloglik_twins(const ParamVector& theta, const TwinData& data);

/// Trio negative log-likelihood. Throws definiteness_error when a component
/// covariance implied by theta is not positive definite.
double negloglik_trios(const ParamVector& theta, const TrioData& data);

/// Analytic gradients of the negative log-likelihoods above, length Q.
Eigen::VectorXd negloglik_gradient(const ParamVector& theta, const TwinData& data);
Eigen::VectorXd negloglik_gradient(const ParamVector& theta, const TrioData& data);

/// Fused value-and-gradient evaluation for optimizers. Instead of throwing on
/// an indefinite trio component it returns +infinity, letting a line search
/// back away. `grad` may be null.
double negloglik_eval(const ParamVector& theta, const TwinData& data,
                      Eigen::VectorXd* grad);
double negloglik_eval(const ParamVector& theta, const TrioData& data,
                      Eigen::VectorXd* grad);

}  // namespace herit
