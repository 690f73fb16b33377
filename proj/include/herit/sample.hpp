#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "herit/likelihood.hpp"
#include "herit/mixture.hpp"

namespace herit {

enum class BatchKind { pairs, twins, trios };

/// Draws from a mixture model. For twins, rows [0, n) are MZ pairs and rows
/// [n, 2n) are DZ pairs, recorded in `zygosity` (0 = MZ, 1 = DZ). `component`
/// holds the latent component label of each draw.
struct SampleBatch {
  BatchKind kind = BatchKind::pairs;
  Eigen::MatrixXd values;
  Eigen::VectorXi component;
  Eigen::VectorXi zygosity;  // twins only
  std::uint64_t seed = 0;

  Eigen::Index rows() const { return values.rows(); }
};

/// Exact sampling: component index from the categorical weights, then a
/// triangular-factor transform of independent standard normals. The same
/// (model, n, seed) always produces the same bytes.
SampleBatch sample(const BivariateMixture& model, Eigen::Index n,
                   std::uint64_t seed);
SampleBatch sample(const TwinJointModel& model, Eigen::Index n_per_zygosity,
                   std::uint64_t seed);
SampleBatch sample(const TrioMixture& model, Eigen::Index n, std::uint64_t seed);

TwinData to_twin_data(const SampleBatch& batch);
TrioData to_trio_data(const SampleBatch& batch);

}  // namespace herit
