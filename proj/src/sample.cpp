#include "herit/sample.hpp"

#include <cmath>
#include <stdexcept>

#include "herit/errors.hpp"
#include "herit/rng.hpp"

namespace herit {

namespace {

template <typename Model>
Eigen::VectorXd cumulative_weights(const Model& model) {
  Eigen::VectorXd cum(model.size());
  double total = 0.0;
  for (int k = 0; k < model.size(); ++k) {
    total += model.components[k].weight;
    cum(k) = total;
  }
  return cum;
}

// lower Cholesky factor of a 2x2 exchangeable covariance
struct PairFactor {
  double mean, l11, l21, l22;
};

PairFactor pair_factor(double mean, double sd, double rho) {
  return {mean, sd, sd * rho, sd * std::sqrt(1.0 - rho * rho)};
}

void draw_pair(const PairFactor& f, SubstreamRng& rng, double& y1, double& y2) {
  const double z1 = rng.normal(), z2 = rng.normal();
  y1 = f.mean + f.l11 * z1;
  y2 = f.mean + f.l21 * z1 + f.l22 * z2;
}

}  // namespace

SampleBatch sample(const BivariateMixture& model, Eigen::Index n,
                   std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  validate(model);
  const Eigen::VectorXd cum = cumulative_weights(model);
  std::vector<PairFactor> factors;
  factors.reserve(model.components.size());
  for (const auto& c : model.components)
    factors.push_back(pair_factor(c.mean, c.sd, c.rho));

  SampleBatch batch;
  batch.kind = BatchKind::pairs;
  batch.seed = seed;
  batch.values.resize(n, 2);
  batch.component.resize(n);
  SubstreamRng rng(seed, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = rng.categorical(cum);
    batch.component(i) = k;
    draw_pair(factors[k], rng, batch.values(i, 0), batch.values(i, 1));
  }
  return batch;
}

SampleBatch sample(const TwinJointModel& model, Eigen::Index n_per_zygosity,
                   std::uint64_t seed) {
  if (n_per_zygosity < 1)
    throw std::invalid_argument("sample size must be at least 1");
  validate(model);
  const Eigen::VectorXd cum = cumulative_weights(model);
  std::vector<PairFactor> mz, dz;
  for (const auto& c : model.components) {
    mz.push_back(pair_factor(c.mean, c.sd, c.rho_mz));
    dz.push_back(pair_factor(c.mean, c.sd, c.rho_dz));
  }

  SampleBatch batch;
  batch.kind = BatchKind::twins;
  batch.seed = seed;
  batch.values.resize(2 * n_per_zygosity, 2);
  batch.component.resize(2 * n_per_zygosity);
  batch.zygosity.resize(2 * n_per_zygosity);
  SubstreamRng rng(seed, 0);
  for (Eigen::Index i = 0; i < 2 * n_per_zygosity; ++i) {
    const bool is_dz = i >= n_per_zygosity;
    const int k = rng.categorical(cum);
    batch.component(i) = k;
    batch.zygosity(i) = is_dz ? 1 : 0;
    draw_pair(is_dz ? dz[k] : mz[k], rng, batch.values(i, 0), batch.values(i, 1));
  }
  return batch;
}

SampleBatch sample(const TrioMixture& model, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  validate(model);
  const Eigen::VectorXd cum = cumulative_weights(model);

  std::vector<Eigen::Matrix3d> factors;
  factors.reserve(model.components.size());
  for (const auto& c : model.components) {
    const Eigen::LLT<Eigen::Matrix3d> llt(trio_covariance(c));
    if (llt.info() != Eigen::Success)
      throw definiteness_error("trio component covariance is not positive definite");
    factors.push_back(llt.matrixL());
  }

  SampleBatch batch;
  batch.kind = BatchKind::trios;
  batch.seed = seed;
  batch.values.resize(n, 3);
  batch.component.resize(n);
  SubstreamRng rng(seed, 0);
  Eigen::Vector3d z;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = rng.categorical(cum);
    batch.component(i) = k;
    z << rng.normal(), rng.normal(), rng.normal();
    const double mean = model.components[k].mean;
    batch.values.row(i) =
        (factors[k] * z).array().transpose() + mean;
  }
  return batch;
}

TwinData to_twin_data(const SampleBatch& batch) {
  if (batch.kind != BatchKind::twins)
    throw model_error("batch does not hold twin draws");
  const Eigen::Index n = batch.rows();
  Eigen::Index n_mz = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (batch.zygosity(i) == 0) ++n_mz;
  TwinData data;
  data.mz.resize(n_mz, 2);
  data.dz.resize(n - n_mz, 2);
  Eigen::Index i_mz = 0, i_dz = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (batch.zygosity(i) == 0)
      data.mz.row(i_mz++) = batch.values.row(i);
    else
      data.dz.row(i_dz++) = batch.values.row(i);
  }
  return data;
}

TrioData to_trio_data(const SampleBatch& batch) {
  if (batch.kind != BatchKind::trios)
    throw model_error("batch does not hold trio draws");
  TrioData data;
  data.values = batch.values;
  return data;
}

}  // namespace herit
