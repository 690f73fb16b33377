#include "herit/bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "herit/delta.hpp"
#include "herit/errors.hpp"
#include "herit/rng.hpp"
#include "herit/sample.hpp"
#include "herit/stats.hpp"

namespace herit {

namespace {

struct Replicate {
  bool ok = false;
  Eigen::VectorXd functionals;
  Eigen::VectorXd parameters;
};

// Runs fn(b) for b in [0, count) across a few worker threads. Each index owns
// its output slot, so the result is identical under any scheduling.
void for_each_index(int count, const std::function<void(int)>& fn) {
  unsigned workers = std::min(8u, std::thread::hardware_concurrency());
  if (workers <= 1 || count < 4) {
    for (int b = 0; b < count; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int b = next.fetch_add(1); b < count; b = next.fetch_add(1)) fn(b);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

BootstrapResult parametric_bootstrap(
    const FitResult& fit, int B,
    const std::vector<BootstrapFunctional>& functionals,
    const FitConfig& config) {
  if (B < 1) throw std::invalid_argument("bootstrap needs B >= 1 replicates");
  if (!fit.converged)
    throw std::invalid_argument("bootstrap requires a converged fit");
  if (functionals.empty())
    throw std::invalid_argument("bootstrap needs at least one functional");

  const ParamVector warm = fit.theta();
  FitConfig refit_config = config;
  refit_config.n_starts = 2;  // warm start plus one jittered start
  refit_config.compute_hessian = false;

  std::vector<Replicate> reps(B);
  for_each_index(B, [&](int b) {
    Replicate& rep = reps[b];
    try {
      FitResult refit;
      if (fit.design == FamilyDesign::twins) {
        const BivariateMixture mz = bivariate_margin(fit.twins, Relationship::mz);
        const BivariateMixture dz = bivariate_margin(fit.twins, Relationship::dz);
        TwinData data;
        data.mz = sample(mz, fit.n_mz, derive_seed(config.seed, 2 * b)).values;
        data.dz = sample(dz, fit.n_dz, derive_seed(config.seed, 2 * b + 1)).values;
        refit = fit_warm(data, warm, refit_config);
      } else {
        TrioData data;
        data.values =
            sample(fit.trios, fit.n_families, derive_seed(config.seed, b)).values;
        refit = fit_warm(data, warm, refit_config);
      }
      if (!refit.converged) return;  // counted as a failure
      rep.functionals.resize(functionals.size());
      for (std::size_t j = 0; j < functionals.size(); ++j)
        rep.functionals(static_cast<Eigen::Index>(j)) = functionals[j].value(refit);
      rep.parameters = natural_parameters(refit);
      rep.ok = true;
    } catch (const std::exception&) {
      rep.ok = false;
    }
  });

  BootstrapResult result;
  result.requested = B;
  for (const auto& rep : reps) result.completed += rep.ok ? 1 : 0;
  result.failed = B - result.completed;
  if (result.failed * 5 > B) {
    throw bootstrap_error("parametric bootstrap unreliable: " +
                          std::to_string(result.failed) + " of " +
                          std::to_string(B) + " replicates failed");
  }

  const auto n_fun = static_cast<Eigen::Index>(functionals.size());
  result.names.reserve(functionals.size());
  for (const auto& f : functionals) result.names.push_back(f.name);
  result.parameter_names = natural_parameter_names(fit.design, fit.m);

  result.samples.resize(result.completed, n_fun);
  result.replicate_parameters.resize(result.completed,
                                     natural_parameters(fit).size());
  Eigen::Index row = 0;
  for (const auto& rep : reps) {
    if (!rep.ok) continue;
    result.samples.row(row) = rep.functionals;
    result.replicate_parameters.row(row) = rep.parameters;
    ++row;
  }

  result.sd.resize(n_fun);
  result.lower.resize(n_fun);
  result.upper.resize(n_fun);
  for (Eigen::Index j = 0; j < n_fun; ++j) {
    result.sd(j) = sample_sd(result.samples.col(j));
    std::vector<double> sorted(result.samples.col(j).data(),
                               result.samples.col(j).data() + result.completed);
    std::sort(sorted.begin(), sorted.end());
    result.lower(j) = quantile_sorted(sorted, 0.025);
    result.upper(j) = quantile_sorted(sorted, 0.975);
  }
  return result;
}

}  // namespace herit
