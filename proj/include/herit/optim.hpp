#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace herit {

/// Smooth objective: returns f(x) and fills `grad` (always requested).
/// A non-finite return value marks an infeasible point; line searches back
/// away from it.
using Objective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
  int max_iterations = 2000;
  double gradient_tolerance = 1e-6;   // max-norm of the gradient
  double function_tolerance = 1e-10;  // relative change between accepted steps
  int memory = 10;
  int max_line_search_steps = 60;
};

struct LbfgsReport {
  Eigen::VectorXd x;
  Eigen::VectorXd gradient;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool gradient_converged = false;
  bool feasible_start = true;
  std::string stop_reason;
};

/// Limited-memory BFGS with a strong-Wolfe line search.
LbfgsReport lbfgs_minimize(const Objective& f, Eigen::VectorXd x0,
                           const LbfgsOptions& options = {});

}  // namespace herit
