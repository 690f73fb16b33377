#include "herit/fit.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <sstream>

#include "herit/errors.hpp"
#include "herit/optim.hpp"
#include "herit/rng.hpp"
#include "herit/stats.hpp"

namespace herit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double start_rho(const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b) {
  return std::clamp(pearson(a, b), -0.99, 0.99);
}

double jittered_rho(double base, bool jitter, SubstreamRng& rng) {
  const double r = jitter ? base + rng.uniform(-0.2, 0.2) : base;
  return std::clamp(r, -0.9, 0.9);
}

// Common initialization inputs shared by every start.
struct InitSummary {
  std::vector<double> pooled_sorted;
  double pooled_sd = 0.0;
};

InitSummary summarize(const std::vector<double>& pooled) {
  InitSummary s;
  s.pooled_sorted = pooled;
  std::sort(s.pooled_sorted.begin(), s.pooled_sorted.end());
  s.pooled_sd = sample_sd(Eigen::Map<const Eigen::VectorXd>(pooled.data(),
                                                            pooled.size()));
  if (!(s.pooled_sd > 0.0))
    throw optimization_error("degenerate data: trait values have zero spread");
  return s;
}

// Quantile-based start: component means at equally spaced quantiles, spreads
// at (sample sd)/sqrt(m) with per-start jitter, correlations at the empirical
// Pearson values jittered by +-0.2, weights uniform. Start 0 is unjittered.
void fill_shared_blocks(Eigen::VectorXd& theta, const InitSummary& s, int m,
                        bool jitter, SubstreamRng& rng) {
  for (int k = 0; k < m; ++k)
    theta(k) = quantile_sorted(s.pooled_sorted, (k + 0.5) / m);
  const double base_sd = s.pooled_sd / std::sqrt(static_cast<double>(m));
  for (int k = 0; k < m; ++k) {
    const double factor = jitter ? rng.uniform(0.6, 1.6) : 1.0;
    theta(m + k) = std::log(base_sd * factor);
  }
}

ParamVector twin_start(const InitSummary& s, const TwinData& data, int m,
                       bool jitter, SubstreamRng& rng) {
  ParamVector pv;
  pv.m = m;
  pv.design = FamilyDesign::twins;
  pv.values.setZero(5 * m - 1);
  fill_shared_blocks(pv.values, s, m, jitter, rng);
  const double r_mz = start_rho(data.mz.col(0), data.mz.col(1));
  const double r_dz = start_rho(data.dz.col(0), data.dz.col(1));
  for (int k = 0; k < m; ++k) {
    pv.values(2 * m + k) = std::atanh(jittered_rho(r_mz, jitter, rng));
    pv.values(3 * m + k) = std::atanh(jittered_rho(r_dz, jitter, rng));
  }
  return pv;  // weight logits stay zero: uniform
}

ParamVector trio_start(const InitSummary& s, const TrioData& data, int m,
                       bool jitter, SubstreamRng& rng) {
  ParamVector pv;
  pv.m = m;
  pv.design = FamilyDesign::trios;
  pv.values.setZero(6 * m - 1);
  fill_shared_blocks(pv.values, s, m, jitter, rng);
  const double r_mf = start_rho(data.values.col(0), data.values.col(1));
  const double r_mc = start_rho(data.values.col(0), data.values.col(2));
  const double r_fc = start_rho(data.values.col(1), data.values.col(2));
  for (int k = 0; k < m; ++k) {
    double a = jittered_rho(r_mf, jitter, rng);
    double b = jittered_rho(r_mc, jitter, rng);
    double c = jittered_rho(r_fc, jitter, rng);
    // shrink toward independence until the correlation matrix is safely
    // positive definite
    for (int step = 0; step < 60; ++step) {
      const double det = 1.0 + 2.0 * a * b * c - a * a - b * b - c * c;
      if (det > 1e-3) break;
      a *= 0.85;
      b *= 0.85;
      c *= 0.85;
    }
    pv.values(2 * m + k) = std::atanh(a);
    pv.values(3 * m + k) = std::atanh(b);
    pv.values(4 * m + k) = std::atanh(c);
  }
  return pv;
}

std::vector<double> pooled_values(const TwinData& data) {
  std::vector<double> pooled;
  pooled.reserve(2 * data.families());
  for (Eigen::Index i = 0; i < data.mz.rows(); ++i) {
    pooled.push_back(data.mz(i, 0));
    pooled.push_back(data.mz(i, 1));
  }
  for (Eigen::Index i = 0; i < data.dz.rows(); ++i) {
    pooled.push_back(data.dz(i, 0));
    pooled.push_back(data.dz(i, 1));
  }
  return pooled;
}

std::vector<double> pooled_values(const TrioData& data) {
  std::vector<double> pooled;
  pooled.reserve(3 * data.families());
  for (Eigen::Index i = 0; i < data.values.rows(); ++i)
    for (int j = 0; j < 3; ++j) pooled.push_back(data.values(i, j));
  return pooled;
}

ParamVector build_start(const InitSummary& s, const TwinData& d, int m,
                        bool jitter, SubstreamRng& rng) {
  return twin_start(s, d, m, jitter, rng);
}
ParamVector build_start(const InitSummary& s, const TrioData& d, int m,
                        bool jitter, SubstreamRng& rng) {
  return trio_start(s, d, m, jitter, rng);
}

template <typename Data>
Eigen::MatrixXd fd_hessian(const ParamVector& theta, const Data& data) {
  const int q = static_cast<int>(theta.values.size());
  Eigen::MatrixXd h(q, q);
  ParamVector probe = theta;
  for (int i = 0; i < q; ++i) {
    const double step = 1e-5 * (1.0 + std::abs(theta.values(i)));
    probe.values = theta.values;
    probe.values(i) += step;
    const Eigen::VectorXd gp = negloglik_gradient(probe, data);
    probe.values(i) = theta.values(i) - step;
    const Eigen::VectorXd gm = negloglik_gradient(probe, data);
    h.col(i) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

void check_data(const TwinData& data) {
  if (data.mz.rows() < 1 || data.dz.rows() < 1)
    throw data_error("twin fits need at least one pair of each zygosity");
}

void check_data(const TrioData& data) {
  if (data.families() < 1) throw data_error("trio fits need at least one trio");
}

// builds the starting point for (start, attempt); jitter applies whenever
// either is nonzero
using StartProvider =
    std::function<ParamVector(int start, int attempt, SubstreamRng& rng)>;

template <typename Data>
FitResult fit_impl(const Data& data, int m, const FitConfig& config,
                   FamilyDesign design, const StartProvider* custom_starts) {
  config.check();
  check_data(data);
  if (m < 1) throw model_error("component count must be at least 1");
  const int q = parameter_count(design, m);
  if (data.families() < q + 1)
    throw data_error("need at least Q+1 = " + std::to_string(q + 1) +
                     " families, got " + std::to_string(data.families()));

  const double scale = 1.0 / static_cast<double>(data.families());

  const Objective objective = [&](const Eigen::VectorXd& x,
                                  Eigen::VectorXd& grad) {
    ParamVector pv;
    pv.values = x;
    pv.m = m;
    pv.design = design;
    Eigen::VectorXd g;
    const double value = negloglik_eval(pv, data, &g);
    if (!std::isfinite(value)) {
      grad.setZero(x.size());
      return kInf;
    }
    grad = g * scale;
    return value * scale;
  };

  LbfgsOptions opts;
  opts.max_iterations = config.max_iterations;
  opts.gradient_tolerance = config.gradient_tolerance;
  opts.function_tolerance = config.function_tolerance;

  std::optional<InitSummary> summary;
  if (!custom_starts) summary = summarize(pooled_values(data));

  FitResult result;
  result.design = design;
  result.m = m;
  result.seed = config.seed;

  Eigen::VectorXd best_x;
  double best_value = kInf;
  bool best_converged = false;

  for (int start = 0; start < config.n_starts; ++start) {
    SubstreamRng rng(config.seed, static_cast<std::uint64_t>(start));
    StartDiagnostic diag;
    diag.index = start;

    LbfgsReport report;
    bool launched = false;
    for (int attempt = 0; attempt < 20; ++attempt) {
      const ParamVector pv =
          custom_starts
              ? (*custom_starts)(start, attempt, rng)
              : build_start(*summary, data, m, start > 0 || attempt > 0, rng);
      report = lbfgs_minimize(objective, pv.values, opts);
      if (report.feasible_start) {
        launched = true;
        break;
      }
    }
    if (!launched) {
      diag.value = kInf;
      diag.message = "no feasible starting point found";
      result.starts.push_back(diag);
      continue;
    }

    diag.value = report.value / scale;
    diag.converged = report.gradient_converged;
    diag.iterations = report.iterations;
    diag.message = report.stop_reason;
    result.starts.push_back(diag);

    if (std::isfinite(report.value) && report.value / scale < best_value) {
      best_value = report.value / scale;
      best_x = report.x;
      best_converged = report.gradient_converged;
    }
  }

  if (!std::isfinite(best_value)) {
    std::ostringstream msg;
    msg << "all " << config.n_starts << " starts failed:";
    for (const auto& d : result.starts)
      msg << " [start " << d.index << ": " << d.message << "]";
    throw optimization_error(msg.str());
  }

  // report the canonically ordered model and evaluate everything there
  ParamVector best_pv;
  best_pv.values = best_x;
  best_pv.m = m;
  best_pv.design = design;
  ParamVector theta;
  if constexpr (std::is_same_v<Data, TwinData>) {
    result.twins = to_natural_twins(best_pv);
    theta = to_unconstrained(result.twins);
    result.n_mz = data.mz.rows();
    result.n_dz = data.dz.rows();
  } else {
    result.trios = to_natural_trios(best_pv);
    theta = to_unconstrained(result.trios);
  }
  result.n_families = data.families();
  result.q = q;
  result.loglik = -negloglik_eval(theta, data, nullptr);
  result.aic = -2.0 * result.loglik + 2.0 * q;
  result.bic = -2.0 * result.loglik +
               std::log(static_cast<double>(result.n_families)) * q;
  result.converged = best_converged;
  if (config.compute_hessian) result.hessian = fd_hessian(theta, data);
  return result;
}

template <typename Data>
ScanTable scan_impl(const Data& data, int m_min, int m_max,
                    const FitConfig& config, FamilyDesign design) {
  if (m_min < 1 || m_max < m_min)
    throw model_error("invalid component range for model scan");
  ScanTable table;
  for (int m = m_min; m <= m_max; ++m) {
    ScanRow row;
    row.m = m;
    row.q = parameter_count(design, m);
    try {
      FitResult f = fit_impl(data, m, config, design, nullptr);
      row.ok = true;
      row.converged = f.converged;
      row.loglik = f.loglik;
      row.aic = f.aic;
      row.bic = f.bic;
      table.fits.emplace_back(std::move(f));
    } catch (const error& e) {
      row.message = e.what();
      table.fits.emplace_back(std::nullopt);
    }
    table.rows.push_back(row);
  }

  double min_aic = kInf, min_bic = kInf;
  for (const auto& row : table.rows) {
    if (!row.ok) continue;
    min_aic = std::min(min_aic, row.aic);
    min_bic = std::min(min_bic, row.bic);
  }
  for (auto& row : table.rows) {
    if (!row.ok) continue;
    row.delta_aic = row.aic - min_aic;
    row.delta_bic = row.bic - min_bic;
    if (row.bic == min_bic && table.recommended_m == 0)
      table.recommended_m = row.m;
  }
  return table;
}

}  // namespace

void FitConfig::check() const {
  if (n_starts < 1) throw model_error("n_starts must be at least 1");
  if (!(gradient_tolerance > 0.0) || !(function_tolerance > 0.0))
    throw model_error("tolerances must be positive");
  if (max_iterations < 1) throw model_error("max_iterations must be positive");
  if (init != "quantile") throw model_error("unknown init strategy: " + init);
}

ParamVector FitResult::theta() const {
  return design == FamilyDesign::twins ? to_unconstrained(twins)
                                       : to_unconstrained(trios);
}

FitResult fit(const TwinData& data, int m, const FitConfig& config) {
  return fit_impl(data, m, config, FamilyDesign::twins, nullptr);
}

FitResult fit(const TrioData& data, int m, const FitConfig& config) {
  return fit_impl(data, m, config, FamilyDesign::trios, nullptr);
}

namespace {

StartProvider warm_provider(const ParamVector& warm) {
  return [warm](int start, int attempt, SubstreamRng& rng) {
    ParamVector pv = warm;
    if (start == 0 && attempt == 0) return pv;
    const int m = pv.m;
    for (Eigen::Index i = 0; i < pv.values.size(); ++i) {
      // means move on the scale of their component spread, the transformed
      // blocks on a fixed scale
      const double scale =
          i < m ? 0.2 * std::exp(pv.values(m + i)) : 0.15;
      pv.values(i) += scale * rng.normal();
    }
    return pv;
  };
}

}  // namespace

FitResult fit_warm(const TwinData& data, const ParamVector& warm,
                   const FitConfig& config) {
  const StartProvider provider = warm_provider(warm);
  return fit_impl(data, warm.m, config, FamilyDesign::twins, &provider);
}

FitResult fit_warm(const TrioData& data, const ParamVector& warm,
                   const FitConfig& config) {
  const StartProvider provider = warm_provider(warm);
  return fit_impl(data, warm.m, config, FamilyDesign::trios, &provider);
}

ScanTable model_scan(const TwinData& data, int m_min, int m_max,
                     const FitConfig& config) {
  return scan_impl(data, m_min, m_max, config, FamilyDesign::twins);
}

ScanTable model_scan(const TrioData& data, int m_min, int m_max,
                     const FitConfig& config) {
  return scan_impl(data, m_min, m_max, config, FamilyDesign::trios);
}

}  // namespace herit
