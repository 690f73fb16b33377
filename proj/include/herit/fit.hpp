#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "herit/likelihood.hpp"
#include "herit/mixture.hpp"
#include "herit/transform.hpp"

namespace herit {

struct FitConfig {
  int n_starts = 6;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-6;   // max-norm, on the per-family mean objective
  double function_tolerance = 1e-10;  // relative change of the mean objective
  std::uint64_t seed = 1;
  std::string init = "quantile";
  bool compute_hessian = true;

  void check() const;
};

struct StartDiagnostic {
  int index = 0;
  double value = 0.0;  // total negative log-likelihood at the start's optimum
  bool converged = false;
  int iterations = 0;
  std::string message;
};

struct FitResult {
  FamilyDesign design = FamilyDesign::twins;
  int m = 0;
  TwinJointModel twins;  // filled when design == twins
  TrioMixture trios;     // filled when design == trios

  double loglik = 0.0;
  int q = 0;
  double aic = 0.0;
  double bic = 0.0;
  Eigen::Index n_families = 0;  // the n in the BIC penalty
  Eigen::Index n_mz = 0, n_dz = 0;

  Eigen::MatrixXd hessian;  // of the total negative log-likelihood at the optimum
  bool converged = false;
  std::vector<StartDiagnostic> starts;
  std::uint64_t seed = 0;

  /// Unconstrained parameters of the reported (canonically ordered) model.
  ParamVector theta() const;
};

/// Maximum-likelihood fit with multi-start quasi-Newton optimization.
/// Starts are built from data quantiles; each start draws its jitter from an
/// independent sub-stream of config.seed, so results do not depend on
/// evaluation order. Throws optimization_error when every start fails.
FitResult fit(const TwinData& data, int m, const FitConfig& config = {});
FitResult fit(const TrioData& data, int m, const FitConfig& config = {});

struct ScanRow {
  int m = 0;
  int q = 0;
  bool ok = false;
  bool converged = false;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double delta_aic = 0.0;
  double delta_bic = 0.0;
  std::string message;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  int recommended_m = 0;  // BIC argmin over successful rows; 0 if none
  std::vector<std::optional<FitResult>> fits;  // aligned with rows
};

/// Fits every m in [m_min, m_max]; failures are recorded per row and the scan
/// continues. Deltas are relative to the row minima among successful rows.
ScanTable model_scan(const TwinData& data, int m_min, int m_max,
                     const FitConfig& config = {});
ScanTable model_scan(const TrioData& data, int m_min, int m_max,
                     const FitConfig& config = {});

/// Refit starting from an explicit parameter vector: start 0 is `warm`
/// itself, later starts jitter it. Used by the parametric bootstrap.
FitResult fit_warm(const TwinData& data, const ParamVector& warm,
                   const FitConfig& config = {});
FitResult fit_warm(const TrioData& data, const ParamVector& warm,
                   const FitConfig& config = {});

}  // namespace herit
