#pragma once

// Independent numerical oracles for the test suites. Everything here stays
// off the library's evaluation paths on purpose: the Gaussian log-density
// goes through a matrix decomposition instead of closed-form inverses, the
// integrator is plain adaptive Simpson, and the mixture generator produces
// models whose tails separate fast enough for the asymptotic checks.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "herit/mixture.hpp"
#include "herit/rng.hpp"

namespace oracles {

/// Generic-d Gaussian log-density via a Cholesky decomposition.
inline double mvn_logpdf_cholesky(const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& mu,
                                  const Eigen::MatrixXd& sigma) {
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("oracle: covariance not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::VectorXd z = l.triangularView<Eigen::Lower>().solve(y - mu);
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det_half += std::log(l(i, i));
  return -0.5 * static_cast<double>(y.size()) * std::log(2.0 * M_PI) -
         log_det_half - 0.5 * z.squaredNorm();
}

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = detail::simpson(a, b, fa, fm, fb);
  return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

/// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Fourth-order central difference; keeps truncation error negligible where
/// the derivative itself nearly vanishes.
inline double central_diff5(const std::function<double(double)>& f, double x,
                            double h) {
  return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) /
         (12.0 * h);
}

/// Two-sample Kolmogorov-Smirnov test at alpha = 0.01.
struct KsOutcome {
  double statistic = 0.0;
  double critical = 0.0;
  bool reject = false;
};

inline KsOutcome ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  KsOutcome out;
  out.statistic = d;
  out.critical = 1.628 * std::sqrt((na + nb) / (na * nb));  // alpha = 0.01
  out.reject = d > out.critical;
  return out;
}

/// Random exchangeable mixtures for property tests. Mean gaps of at least
/// half the widest spread and spread ratios of at least 1.25 (or exact ties)
/// keep the tail-dominance checks well inside their tolerances.
inline herit::BivariateMixture random_mixture(herit::SubstreamRng& rng,
                                              int max_components = 4) {
  const int m = 1 + static_cast<int>(rng.uniform() * max_components);
  herit::BivariateMixture model;

  std::vector<double> sds(m);
  const double base = rng.uniform(0.5, 3.0);
  double sd = base;
  for (int k = 0; k < m; ++k) {
    if (k > 0 && rng.uniform() > 0.3)
      sd *= rng.uniform(1.25, 2.0);  // else keep an exact tie
    sds[k] = sd;
  }

  const double gap = 0.5 * sds.back();
  double mean = rng.uniform(-2.0, 2.0);
  Eigen::VectorXd raw(m);
  for (int k = 0; k < m; ++k) {
    raw(k) = rng.uniform(0.05, 1.0);
    model.components.push_back(
        {0.0, mean, sds[k], rng.uniform(-0.9, 0.9)});
    mean += gap * rng.uniform(1.0, 2.0);
  }
  raw /= raw.sum();
  // keep every weight at least 0.05
  raw = (raw.array() * (1.0 - 0.05 * m)) + 0.05;
  for (int k = 0; k < m; ++k) model.components[k].weight = raw(k);

  herit::canonicalize(model);
  herit::validate(model);
  return model;
}

}  // namespace oracles
