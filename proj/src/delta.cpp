#include "herit/delta.hpp"

#include <cmath>

#include "herit/errors.hpp"

namespace herit {

namespace {

Eigen::VectorXd flatten_twins(const TwinJointModel& model) {
  const int m = model.size();
  Eigen::VectorXd v(5 * m);
  for (int k = 0; k < m; ++k) {
    const auto& c = model.components[k];
    v(k) = c.mean;
    v(m + k) = c.sd;
    v(2 * m + k) = c.rho_mz;
    v(3 * m + k) = c.rho_dz;
    v(4 * m + k) = c.weight;
  }
  return v;
}

Eigen::VectorXd flatten_trios(const TrioMixture& model) {
  const int m = model.size();
  Eigen::VectorXd v(6 * m);
  for (int k = 0; k < m; ++k) {
    const auto& c = model.components[k];
    v(k) = c.mean;
    v(m + k) = c.sd;
    v(2 * m + k) = c.rho_mf;
    v(3 * m + k) = c.rho_mc;
    v(4 * m + k) = c.rho_fc;
    v(5 * m + k) = c.weight;
  }
  return v;
}

}  // namespace

Eigen::VectorXd delta_method_se(const FitResult& fit, const ThetaFunctional& g) {
  if (fit.hessian.size() == 0)
    throw inference_error("no Hessian available for delta-method inference");
  const Eigen::LLT<Eigen::MatrixXd> llt(fit.hessian);
  if (llt.info() != Eigen::Success)
    throw inference_error(
        "observed information is singular or indefinite; "
        "delta-method inference unavailable");

  const ParamVector theta = fit.theta();
  const int q = static_cast<int>(theta.values.size());

  ParamVector probe = theta;
  Eigen::MatrixXd jac;  // n_out x q
  for (int i = 0; i < q; ++i) {
    const double step = 1e-6 * (1.0 + std::abs(theta.values(i)));
    probe.values = theta.values;
    probe.values(i) += step;
    const Eigen::VectorXd up = g(probe);
    probe.values(i) = theta.values(i) - step;
    const Eigen::VectorXd down = g(probe);
    if (i == 0) jac.resize(up.size(), q);
    jac.col(i) = (up - down) / (2.0 * step);
  }

  const Eigen::MatrixXd hinv_jt = llt.solve(jac.transpose());
  Eigen::VectorXd se(jac.rows());
  for (Eigen::Index j = 0; j < jac.rows(); ++j)
    se(j) = std::sqrt(std::max(0.0, jac.row(j).dot(hinv_jt.col(j))));
  return se;
}

CurveSeries with_bands(CurveSeries curve, const Eigen::VectorXd& se) {
  curve.se = se;
  curve.lower = curve.value - 1.96 * se;
  curve.upper = curve.value + 1.96 * se;
  return curve;
}

std::vector<std::string> natural_parameter_names(FamilyDesign design, int m) {
  std::vector<std::string> names;
  const std::vector<std::string> rho_labels =
      design == FamilyDesign::twins ? std::vector<std::string>{"rho_MZ", "rho_DZ"}
                                    : std::vector<std::string>{"rho_MF", "rho_MC", "rho_FC"};
  auto block = [&](const std::string& stem) {
    for (int k = 1; k <= m; ++k) names.push_back(stem + "_" + std::to_string(k));
  };
  block("mu");
  block("sigma");
  for (const auto& label : rho_labels) block(label);
  block("p");
  return names;
}

Eigen::VectorXd natural_parameters(const FitResult& fit) {
  return fit.design == FamilyDesign::twins ? flatten_twins(fit.twins)
                                           : flatten_trios(fit.trios);
}

Eigen::VectorXd natural_parameter_se(const FitResult& fit) {
  const FamilyDesign design = fit.design;
  return delta_method_se(fit, [design](const ParamVector& theta) {
    return design == FamilyDesign::twins ? flatten_twins(to_natural_twins(theta))
                                         : flatten_trios(to_natural_trios(theta));
  });
}

}  // namespace herit
