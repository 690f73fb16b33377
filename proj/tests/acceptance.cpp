// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Runs everything from reference parameter fixtures and
// seeded simulations; no external data needed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "herit/bootstrap.hpp"
#include "herit/delta.hpp"
#include "herit/fit.hpp"
#include "herit/heritability.hpp"
#include "herit/sample.hpp"
#include "oracles.hpp"

using namespace herit;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// --------------------------------------------------------------------------

Outcome twin_global_moments() {
  Outcome out;
  const auto g = global_moments(fixtures::twin_fixture());
  out.require(std::abs(g.mean - 21.39) < 0.005, "mu=" + fmt(g.mean));
  out.require(std::abs(g.sd() - 0.88) < 0.005, "sigma=" + fmt(g.sd()));
  out.require(std::abs(g.rho.at(Relationship::mz) - 0.78) < 0.005,
              "rho_MZ=" + fmt(g.rho.at(Relationship::mz)));
  out.require(std::abs(g.rho.at(Relationship::dz) - 0.30) < 0.005,
              "rho_DZ=" + fmt(g.rho.at(Relationship::dz)));
  return out;
}

Outcome trio_global_moments() {
  Outcome out;
  const auto g = global_moments(fixtures::trio_fixture());
  out.require(std::abs(g.mean - 3493.0) <= 0.5, "mu=" + fmt(g.mean));
  out.require(std::abs(g.sd() - 555.0) <= 0.5, "sigma=" + fmt(g.sd()));
  out.require(std::abs(g.rho.at(Relationship::mc) - 0.201) <= 0.002,
              "rho_MC=" + fmt(g.rho.at(Relationship::mc)));
  out.require(std::abs(g.rho.at(Relationship::fc) - 0.124) <= 0.002,
              "rho_FC=" + fmt(g.rho.at(Relationship::fc)));
  return out;
}

Outcome tail_limit_fixture() {
  Outcome out;
  const auto model = fixtures::threecomp_fixture();
  const auto tails = tail_limits(model);
  out.require(tails.tail_case == TailCase::one, "expected case I");
  out.require(tails.left.dominant == 2 && tails.right.dominant == 2,
              "dominant component is not the third");
  out.require(std::abs(tails.left.rho_tilde - 0.5062) <= 0.001,
              "rho_tilde=" + fmt(tails.left.rho_tilde));
  out.require(tails.left.rho_tilde == tails.right.rho_tilde,
              "tails disagree in case I");

  const auto g = global_moments(model);
  for (const double y : {g.mean - 50.0 * g.sd(), g.mean + 50.0 * g.sd()}) {
    const double rho = correlation_at(model, y, g.sd());
    out.require(std::abs(rho - tails.left.rho_tilde) < 1e-3,
                "curve at y=" + fmt(y) + " off by " +
                    fmt(std::abs(rho - tails.left.rho_tilde)));
  }
  return out;
}

Outcome classical_decompositions() {
  Outcome out;
  const auto trio = trio_ace(0.201, 0.123);
  out.require(std::abs(trio.a2 - 2.0 * 0.123) <= 1e-12, "a2=" + fmt(trio.a2));
  out.require(std::abs(trio.a2 + trio.c2 + trio.d2 + trio.e2 - 1.0) <= 1e-12,
              "trio decomposition sum");

  const auto ade = ade_moments(0.78, 0.30);
  out.require(std::abs(ade.a2 - 0.42) <= 1e-12, "ade a2=" + fmt(ade.a2));
  out.require(std::abs(ade.d2 - 0.36) <= 1e-12, "ade d2=" + fmt(ade.d2));
  out.require(std::abs(ade.e2 - 0.22) <= 1e-12, "ade e2=" + fmt(ade.e2));
  out.require(std::abs(ade.a2 + ade.c2 + ade.d2 + ade.e2 - 1.0) <= 1e-12,
              "ade decomposition sum");

  const auto ace = falconer_ace(0.8, 0.5);
  out.require(std::abs(ace.a2 + ace.c2 + ace.d2 + ace.e2 - 1.0) <= 1e-12,
              "ace decomposition sum");
  return out;
}

Outcome slope_identity() {
  Outcome out;
  std::vector<BivariateMixture> models = {
      bivariate_margin(fixtures::twin_fixture(), Relationship::mz),
      bivariate_margin(fixtures::twin_fixture(), Relationship::dz),
      trio_pair_margin(fixtures::trio_fixture(), Relationship::mc),
      trio_pair_margin(fixtures::trio_fixture(), Relationship::fc),
      trio_pair_margin(fixtures::trio_fixture(), Relationship::mf),
      fixtures::threecomp_fixture()};
  double overall = 0.0;
  for (std::size_t idx = 0; idx < models.size(); ++idx) {
    const auto& model = models[idx];
    const Eigen::VectorXd grid = default_grid(global_moments(model), 201);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double beta = local_moments(model, grid(i)).slope;
      const double h = 1e-4 * (1.0 + std::abs(grid(i)));
      const double fd = oracles::central_diff5(
          [&](double y) { return local_moments(model, y).mean; }, grid(i), h);
      worst = std::max(worst, std::abs(beta - fd) / std::abs(beta));
    }
    out.require(worst < 1e-6,
                "margin " + std::to_string(idx) + " worst rel err " + fmt(worst));
    overall = std::max(overall, worst);
  }
  out.detail << "worst rel err " << fmt(overall);
  return out;
}

Outcome density_identities() {
  Outcome out;
  const std::vector<BivariateMixture> models = {
      bivariate_margin(fixtures::twin_fixture(), Relationship::mz),
      fixtures::threecomp_fixture()};

  for (const auto& model : models) {
    const auto g = global_moments(model);

    // exchangeability on a 20 x 20 grid
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(
        20, g.mean - 4.0 * g.sd(), g.mean + 4.0 * g.sd());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      for (Eigen::Index j = 0; j < grid.size(); ++j)
        worst = std::max(worst, std::abs(pair_density(model, grid(i), grid(j)) -
                                         pair_density(model, grid(j), grid(i))));
    out.require(worst <= 1e-12, "density asymmetry " + fmt(worst));

    // normalization of the marginal
    const double mass = oracles::integrate(
        [&](double y) { return marginal_density(model, y); },
        g.mean - 12.0 * g.sd(), g.mean + 12.0 * g.sd());
    out.require(std::abs(mass - 1.0) <= 1e-8, "marginal mass " + fmt(mass));
  }

  // Monte Carlo law of total variance at N = 200,000
  const auto model = fixtures::threecomp_fixture();
  const auto g = global_moments(model);
  const SampleBatch batch = sample(model, 200000, 51);
  Eigen::VectorXd mu_draws(batch.rows());
  double mean_var = 0.0;
  for (Eigen::Index i = 0; i < batch.rows(); ++i) {
    const auto loc = local_moments(model, batch.values(i, 1));
    mu_draws(i) = loc.mean;
    mean_var += loc.variance;
  }
  mean_var /= static_cast<double>(batch.rows());
  const double var_mu = (mu_draws.array() - mu_draws.mean()).square().sum() /
                        static_cast<double>(batch.rows() - 1);
  const double rel = std::abs(var_mu + mean_var - g.variance) / g.variance;
  out.require(rel < 0.015, "total-variance identity off by " + fmt(rel));
  return out;
}

Outcome parameter_counting() {
  Outcome out;
  FitConfig config;
  config.n_starts = 2;
  config.max_iterations = 500;
  config.seed = 61;

  const TwinData twins = to_twin_data(sample(fixtures::twin_fixture(), 220, 42));
  const ScanTable twin_scan = model_scan(twins, 1, 5, config);
  const int twin_expected[] = {4, 9, 14, 19, 24};
  for (int i = 0; i < 5; ++i)
    out.require(twin_scan.rows[i].q == twin_expected[i],
                "twin Q(m=" + std::to_string(i + 1) + ")=" +
                    std::to_string(twin_scan.rows[i].q));

  const TrioData trios = to_trio_data(sample(fixtures::trio_fixture(), 350, 43));
  const ScanTable trio_scan = model_scan(trios, 1, 7, config);
  const int trio_expected[] = {5, 11, 17, 23, 29, 35, 41};
  for (int i = 0; i < 7; ++i)
    out.require(trio_scan.rows[i].q == trio_expected[i],
                "trio Q(m=" + std::to_string(i + 1) + ")=" +
                    std::to_string(trio_scan.rows[i].q));

  for (const auto& table : {twin_scan, trio_scan}) {
    for (const auto& row : table.rows) {
      if (!row.ok) continue;
      out.require(row.aic == -2.0 * row.loglik + 2.0 * row.q, "AIC identity");
      const double n = table.rows.size() == 5 ? 440.0 : 350.0;
      out.require(row.bic == -2.0 * row.loglik + std::log(n) * row.q,
                  "BIC identity");
    }
  }
  return out;
}

Outcome parameter_recovery() {
  Outcome out;
  const auto truth = fixtures::twin_fixture();

  // recovery within three delta-method standard errors
  const TwinData data = to_twin_data(sample(truth, 5000, 101));
  FitConfig config;
  config.seed = 11;
  config.n_starts = 4;
  const FitResult result = fit(data, 2, config);
  out.require(result.converged, "recovery fit did not converge");

  const Eigen::VectorXd estimates = natural_parameters(result);
  const Eigen::VectorXd se = natural_parameter_se(result);
  const auto names = natural_parameter_names(result.design, result.m);
  Eigen::VectorXd target(10);
  target << 21.20, 22.20, 0.63, 1.26, 0.75, 0.70, 0.28, -0.04, 0.81, 0.19;
  double worst_gap = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double gap = std::abs(estimates(i) - target(i)) / se(i);
    worst_gap = std::max(worst_gap, gap);
    out.require(gap <= 3.0, names[i] + " off by " + fmt(gap) + " se");
  }

  // BIC should select m = 2 in at least 9 of 10 seeded replications
  int picks = 0;
  for (int s = 0; s < 10; ++s) {
    const TwinData rep = to_twin_data(sample(truth, 5000, 200 + s));
    FitConfig scan_config;
    scan_config.seed = 33 + s;
    scan_config.n_starts = 3;
    const ScanTable table = model_scan(rep, 1, 3, scan_config);
    picks += table.recommended_m == 2 ? 1 : 0;
  }
  out.require(picks >= 9, "BIC selected m=2 in " + std::to_string(picks) + "/10");
  out.detail << "largest gap " << fmt(worst_gap) << " se, BIC picks "
             << picks << "/10";
  return out;
}

Outcome inference_cross_validation() {
  Outcome out;
  const TwinData data = to_twin_data(sample(fixtures::twin_fixture(), 2000, 301));
  FitConfig config;
  config.seed = 7;
  config.n_starts = 4;
  const FitResult result = fit(data, 2, config);
  out.require(result.converged, "fit did not converge");

  // grid median of the default 201-point grid is the global mean
  const auto g = global_moments(result.twins);
  const double y_med = default_grid(g, 201)(100);

  const auto rho_at_median = [y_med](const TwinJointModel& model) {
    const auto margin = bivariate_margin(model, Relationship::mz);
    return correlation_at(margin, y_med,
                          std::sqrt(global_moments(model).variance));
  };

  const Eigen::VectorXd se_delta =
      delta_method_se(result, [&](const ParamVector& theta) {
        return Eigen::VectorXd::Constant(1, rho_at_median(to_natural_twins(theta)));
      });

  FitConfig boot_config;
  boot_config.seed = 8;
  const BootstrapResult boot = parametric_bootstrap(
      result, 200,
      {{"rho_MZ(median)",
        [&](const FitResult& f) { return rho_at_median(f.twins); }}},
      boot_config);
  out.require(boot.completed >= 160, "bootstrap completed " +
                                         std::to_string(boot.completed) + "/200");

  const double rel = std::abs(se_delta(0) - boot.sd(0)) / boot.sd(0);
  out.detail << "delta=" << fmt(se_delta(0)) << " boot=" << fmt(boot.sd(0))
             << " rel=" << fmt(rel);
  out.require(rel <= 0.30, "disagreement " + fmt(rel));
  return out;
}

Outcome equal_spread_limit() {
  Outcome out;
  // three equal-spread components, between/within variance ratio 3
  const double a = std::sqrt(4.5);
  BivariateMixture model;
  model.components = {{1.0 / 3.0, -a, 1.0, 0.5},
                      {1.0 / 3.0, 0.0, 1.0, 0.4},
                      {1.0 / 3.0, a, 1.0, 0.7}};
  const double gamma = equal_spread_variance_ratio(model);
  out.require(std::abs(gamma - 3.0) < 1e-12, "gamma=" + fmt(gamma));

  const auto tails = tail_limits(model);
  out.require(std::abs(tails.left.rho_tilde - 0.7559) <= 1e-4,
              "left limit " + fmt(tails.left.rho_tilde));
  out.require(std::abs(tails.left.rho_tilde -
                       equal_spread_tail_correlation(0.5, gamma)) <= 1e-10,
              "left routes disagree");
  out.require(std::abs(tails.right.rho_tilde -
                       equal_spread_tail_correlation(0.7, gamma)) <= 1e-10,
              "right routes disagree");
  return out;
}

}  // namespace

int main() {
  using Criterion = std::pair<std::string, std::function<Outcome()>>;
  const std::vector<Criterion> criteria = {
      {"twin global moments match their reference values", twin_global_moments},
      {"trio global moments match their reference values", trio_global_moments},
      {"tail limits of the three-component fixture", tail_limit_fixture},
      {"classical variance decompositions", classical_decompositions},
      {"conditional-mean slope matches finite differences", slope_identity},
      {"exchangeability, normalization, total variance", density_identities},
      {"parameter counts and information criteria", parameter_counting},
      {"simulation recovery and BIC selection", parameter_recovery},
      {"delta-method and bootstrap uncertainties agree", inference_cross_validation},
      {"equal-spread tail limit formula", equal_spread_limit},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto started = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail << "exception: " << e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    failures += outcome.pass ? 0 : 1;
    std::printf("[%2zu] %s  %s (%.1fs)%s%s\n", i + 1,
                outcome.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), seconds,
                outcome.detail.str().empty() ? "" : " -- ",
                outcome.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
