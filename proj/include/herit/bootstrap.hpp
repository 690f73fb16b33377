#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "herit/fit.hpp"

namespace herit {

/// A scalar summary evaluated on each bootstrap refit.
struct BootstrapFunctional {
  std::string name;
  std::function<double(const FitResult&)> value;
};

struct BootstrapResult {
  int requested = 0;  // B
  int completed = 0;
  int failed = 0;
  std::vector<std::string> names;
  Eigen::MatrixXd samples;               // completed x functionals
  Eigen::VectorXd sd;                    // over completed replicates
  Eigen::VectorXd lower, upper;          // 2.5 / 97.5 percentiles
  Eigen::MatrixXd replicate_parameters;  // completed x natural parameters
  std::vector<std::string> parameter_names;
};

/// Parametric bootstrap: B times, simulate a dataset of the original size
/// from the fitted model, refit (warm start at the fitted parameters plus one
/// jittered start), and evaluate the functionals. Replicate b draws from
/// sub-stream (seed, b), so the result does not depend on scheduling.
/// Summaries cover converged replicates only; more than 20% failures raise
/// bootstrap_error.
BootstrapResult parametric_bootstrap(const FitResult& fit, int B,
                                     const std::vector<BootstrapFunctional>& functionals,
                                     const FitConfig& config);

}  // namespace herit
