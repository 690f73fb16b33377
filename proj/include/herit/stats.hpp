#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace herit {

/// Quantile of an ascending-sorted sequence, linearly interpolated.
inline double quantile_sorted(const std::vector<double>& sorted, double prob) {
  const double pos = prob * (static_cast<double>(sorted.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

inline double quantile(std::vector<double> values, double prob) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, prob);
}

inline double sample_mean(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return x.mean();
}

/// Unbiased sample standard deviation.
inline double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().sum() /
                   (static_cast<double>(x.size()) - 1.0));
}

/// Pearson correlation of two columns.
inline double pearson(const Eigen::Ref<const Eigen::VectorXd>& a,
                      const Eigen::Ref<const Eigen::VectorXd>& b) {
  const Eigen::ArrayXd ca = a.array() - a.mean();
  const Eigen::ArrayXd cb = b.array() - b.mean();
  const double denom = std::sqrt(ca.square().sum() * cb.square().sum());
  return denom == 0.0 ? 0.0 : (ca * cb).sum() / denom;
}

}  // namespace herit
