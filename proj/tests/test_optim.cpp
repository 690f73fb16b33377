#include <doctest.h>

#include <cmath>
#include <limits>

#include "herit/optim.hpp"

using namespace herit;

TEST_CASE("quadratic bowl") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  const auto report = lbfgs_minimize(f, Eigen::VectorXd::Constant(5, 3.0));
  CHECK(report.gradient_converged);
  CHECK(report.x.norm() < 1e-6);
  CHECK(report.value < 1e-10);
}

TEST_CASE("rosenbrock valley") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double a = 1.0 - x(0);
    const double b = x(1) - x(0) * x(0);
    g.resize(2);
    g(0) = -2.0 * a - 400.0 * x(0) * b;
    g(1) = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto report = lbfgs_minimize(f, x0);
  CHECK(report.gradient_converged);
  CHECK(std::abs(report.x(0) - 1.0) < 1e-6);
  CHECK(std::abs(report.x(1) - 1.0) < 1e-6);
}

TEST_CASE("infeasible region is avoided") {
  // objective undefined left of x = -0.5; the minimizer must stay clear
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(1);
    if (x(0) < -0.5) {
      g.setZero();
      return std::numeric_limits<double>::infinity();
    }
    g(0) = 2.0 * (x(0) + 0.4);
    return (x(0) + 0.4) * (x(0) + 0.4);
  };
  Eigen::VectorXd x0(1);
  x0 << 5.0;
  const auto report = lbfgs_minimize(f, x0);
  CHECK(std::abs(report.x(0) + 0.4) < 1e-5);
}

TEST_CASE("infeasible start is reported") {
  const Objective f = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
    g.setZero(1);
    return std::numeric_limits<double>::infinity();
  };
  const auto report = lbfgs_minimize(f, Eigen::VectorXd::Zero(1));
  CHECK_FALSE(report.feasible_start);
  CHECK_FALSE(report.gradient_converged);
}

TEST_CASE("iteration cap is honored") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  LbfgsOptions opts;
  opts.max_iterations = 1;
  const auto report = lbfgs_minimize(f, Eigen::VectorXd::Constant(3, 10.0), opts);
  CHECK(report.iterations <= 1);
}
