#include "herit/likelihood.hpp"

#include <cmath>
#include <limits>

#include "herit/density.hpp"
#include "herit/errors.hpp"

namespace herit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kahan-compensated accumulator for the log-likelihood sum.
struct CompensatedSum {
  double total = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = total + y;
    carry = (t - total) - y;
    total = t;
  }
};

// Parameters of one bivariate component group, pre-transformed for fast
// per-observation evaluation.
struct PairComponent {
  double mean, sd, rho;
  double var;           // sd^2
  double one_m_r2;      // 1 - rho^2
  double inv_q_denom;   // 1 / (var * (1 - rho^2))
  double log_norm;      // log p - log 2pi - 2 log sd - 0.5 log(1 - rho^2)
};

std::vector<PairComponent> make_pair_components(const Eigen::VectorXd& p,
                                                const Eigen::VectorXd& mu,
                                                const Eigen::VectorXd& sd,
                                                const Eigen::VectorXd& rho) {
  const int m = static_cast<int>(p.size());
  std::vector<PairComponent> out(m);
  for (int k = 0; k < m; ++k) {
    PairComponent& c = out[k];
    c.mean = mu(k);
    c.sd = sd(k);
    c.rho = rho(k);
    c.var = sd(k) * sd(k);
    c.one_m_r2 = 1.0 - rho(k) * rho(k);
    c.inv_q_denom = 1.0 / (c.var * c.one_m_r2);
    c.log_norm = std::log(p(k)) - constants::log_two_pi -
                 2.0 * std::log(sd(k)) - 0.5 * std::log(c.one_m_r2);
  }
  return out;
}

// Natural parameters unpacked from theta in the order theta stores them;
// no canonical re-sorting happens here so gradients line up with theta.
struct TwinNatural {
  Eigen::VectorXd p, mu, sd, rho_mz, rho_dz;
};

TwinNatural unpack_twins(const ParamVector& theta) {
  if (theta.design != FamilyDesign::twins || theta.values.size() != theta.q())
    throw model_error("parameter vector does not describe a twin model");
  if (!theta.values.allFinite()) throw model_error("non-finite parameter vector");
  const int m = theta.m;
  TwinNatural n;
  n.mu = theta.values.segment(0, m);
  n.sd = theta.values.segment(m, m).array().exp();
  n.rho_mz = theta.values.segment(2 * m, m).array().tanh();
  n.rho_dz = theta.values.segment(3 * m, m).array().tanh();
  n.p = m > 1 ? weights_from_logits(theta.values.tail(m - 1), m)
              : Eigen::VectorXd::Ones(1);
  return n;
}

struct TrioNatural {
  Eigen::VectorXd p, mu, sd, rho_mf, rho_mc, rho_fc;
};

TrioNatural unpack_trios(const ParamVector& theta) {
  if (theta.design != FamilyDesign::trios || theta.values.size() != theta.q())
    throw model_error("parameter vector does not describe a trio model");
  if (!theta.values.allFinite()) throw model_error("non-finite parameter vector");
  const int m = theta.m;
  TrioNatural n;
  n.mu = theta.values.segment(0, m);
  n.sd = theta.values.segment(m, m).array().exp();
  n.rho_mf = theta.values.segment(2 * m, m).array().tanh();
  n.rho_mc = theta.values.segment(3 * m, m).array().tanh();
  n.rho_fc = theta.values.segment(4 * m, m).array().tanh();
  n.p = m > 1 ? weights_from_logits(theta.values.tail(m - 1), m)
              : Eigen::VectorXd::Ones(1);
  return n;
}

// Accumulates one zygosity group into the negative log-likelihood and,
// optionally, into the gradient blocks. rho_offset selects the zygosity's
// atanh-rho block inside theta.
//
// Per observation the posterior-weighted component scores are
//   d log phi / d mu    = (u + v) / (var (1 + rho))
//   d log phi / d logsd = q - 2
//   d log phi / d zrho  = rho - [rho (u^2+v^2) - uv (1+rho^2)] / (var (1-rho^2))
// and the weight-logit score is p*_k - p_k.
void accumulate_pairs(const Eigen::MatrixX2d& ys,
                      const std::vector<PairComponent>& comp,
                      const Eigen::VectorXd& p, int m, int rho_offset,
                      CompensatedSum& nll, Eigen::VectorXd* grad) {
  const Eigen::Index n = ys.rows();
  Eigen::VectorXd lg(m), w(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y1 = ys(i, 0), y2 = ys(i, 1);
    for (int k = 0; k < m; ++k) {
      const PairComponent& c = comp[k];
      const double u = y1 - c.mean, v = y2 - c.mean;
      const double q = (u * u + v * v - 2.0 * c.rho * (u * v)) * c.inv_q_denom;
      lg(k) = c.log_norm - 0.5 * q;
    }
    const double top = lg.maxCoeff();
    const double sum = (lg.array() - top).exp().sum();
    const double ll = top + std::log(sum);
    nll.add(-ll);
    if (!grad) continue;

    w = (lg.array() - ll).exp();
    for (int k = 0; k < m; ++k) {
      const PairComponent& c = comp[k];
      const double u = y1 - c.mean, v = y2 - c.mean;
      const double a = u * u + v * v, b = u * v;
      const double q = (a - 2.0 * c.rho * b) * c.inv_q_denom;
      const double wk = w(k);
      (*grad)(k) -= wk * (u + v) / (c.var * (1.0 + c.rho));
      (*grad)(m + k) -= wk * (q - 2.0);
      (*grad)(rho_offset + k) -=
          wk * (c.rho - (c.rho * a - b * (1.0 + c.rho * c.rho)) / (c.var * c.one_m_r2));
    }
    for (int k = 1; k < m; ++k)
      (*grad)(4 * m + (k - 1)) -= w(k) - p(k);
  }
}

double twins_eval(const ParamVector& theta, const TwinData& data,
                  Eigen::VectorXd* grad) {
  if (data.families() == 0) throw data_error("no twin pairs to evaluate");
  const TwinNatural nat = unpack_twins(theta);
  const int m = theta.m;
  const auto mz = make_pair_components(nat.p, nat.mu, nat.sd, nat.rho_mz);
  const auto dz = make_pair_components(nat.p, nat.mu, nat.sd, nat.rho_dz);
  if (grad) grad->setZero(theta.q());
  CompensatedSum nll;
  accumulate_pairs(data.mz, mz, nat.p, m, 2 * m, nll, grad);
  accumulate_pairs(data.dz, dz, nat.p, m, 3 * m, nll, grad);
  return nll.total;
}

// One trio component with its correlation matrix inverted in closed form.
struct TrioComponentEval {
  double mean, sd;
  double rho[3];        // MF, MC, FC
  double rinv[3][3];    // inverse of the correlation matrix
  double log_norm;
  bool positive_definite = false;
};

std::vector<TrioComponentEval> make_trio_components(const TrioNatural& nat) {
  const int m = static_cast<int>(nat.p.size());
  std::vector<TrioComponentEval> out(m);
  for (int k = 0; k < m; ++k) {
    TrioComponentEval& c = out[k];
    c.mean = nat.mu(k);
    c.sd = nat.sd(k);
    const double a = nat.rho_mf(k), b = nat.rho_mc(k), d = nat.rho_fc(k);
    c.rho[0] = a;
    c.rho[1] = b;
    c.rho[2] = d;
    const double det = 1.0 + 2.0 * a * b * d - a * a - b * b - d * d;
    if (!(det > 0.0)) return out;  // positive_definite stays false from k on
    c.rinv[0][0] = (1.0 - d * d) / det;
    c.rinv[1][1] = (1.0 - b * b) / det;
    c.rinv[2][2] = (1.0 - a * a) / det;
    c.rinv[0][1] = c.rinv[1][0] = (d * b - a) / det;
    c.rinv[0][2] = c.rinv[2][0] = (a * d - b) / det;
    c.rinv[1][2] = c.rinv[2][1] = (a * b - d) / det;
    c.log_norm = std::log(nat.p(k)) - 1.5 * constants::log_two_pi -
                 3.0 * std::log(c.sd) - 0.5 * std::log(det);
    c.positive_definite = true;
  }
  return out;
}

double trios_eval(const ParamVector& theta, const TrioData& data,
                  Eigen::VectorXd* grad, bool throw_on_indefinite) {
  if (data.families() == 0) throw data_error("no trios to evaluate");
  const TrioNatural nat = unpack_trios(theta);
  const int m = theta.m;
  const auto comp = make_trio_components(nat);
  for (const auto& c : comp) {
    if (!c.positive_definite) {
      if (throw_on_indefinite)
        throw definiteness_error("trio component covariance is not positive definite");
      return kInf;
    }
  }

  if (grad) grad->setZero(theta.q());
  CompensatedSum nll;
  Eigen::VectorXd lg(m), w(m);
  double s[3], t[3];
  for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
    for (int k = 0; k < m; ++k) {
      const TrioComponentEval& c = comp[k];
      for (int j = 0; j < 3; ++j) s[j] = (data.values(i, j) - c.mean) / c.sd;
      double q = 0.0;
      for (int r = 0; r < 3; ++r) {
        t[r] = c.rinv[r][0] * s[0] + c.rinv[r][1] * s[1] + c.rinv[r][2] * s[2];
        q += s[r] * t[r];
      }
      lg(k) = c.log_norm - 0.5 * q;
    }
    const double top = lg.maxCoeff();
    const double ll = top + std::log((lg.array() - top).exp().sum());
    nll.add(-ll);
    if (!grad) continue;

    w = (lg.array() - ll).exp();
    for (int k = 0; k < m; ++k) {
      const TrioComponentEval& c = comp[k];
      for (int j = 0; j < 3; ++j) s[j] = (data.values(i, j) - c.mean) / c.sd;
      double q = 0.0;
      for (int r = 0; r < 3; ++r) {
        t[r] = c.rinv[r][0] * s[0] + c.rinv[r][1] * s[1] + c.rinv[r][2] * s[2];
        q += s[r] * t[r];
      }
      const double wk = w(k);
      (*grad)(k) -= wk * (t[0] + t[1] + t[2]) / c.sd;
      (*grad)(m + k) -= wk * (q - 3.0);
      (*grad)(2 * m + k) -= wk * (1.0 - c.rho[0] * c.rho[0]) *
                            (t[0] * t[1] - c.rinv[0][1]);
      (*grad)(3 * m + k) -= wk * (1.0 - c.rho[1] * c.rho[1]) *
                            (t[0] * t[2] - c.rinv[0][2]);
      (*grad)(4 * m + k) -= wk * (1.0 - c.rho[2] * c.rho[2]) *
                            (t[1] * t[2] - c.rinv[1][2]);
    }
    for (int k = 1; k < m; ++k)
      (*grad)(5 * m + (k - 1)) -= w(k) - nat.p(k);
  }
  return nll.total;
}

}  // namespace

double negloglik_twins(const ParamVector& theta, const TwinData& data) {
  return twins_eval(theta, data, nullptr);
}

double negloglik_trios(const ParamVector& theta, const TrioData& data) {
  return trios_eval(theta, data, nullptr, /*throw_on_indefinite=*/true);
}

Eigen::VectorXd negloglik_gradient(const ParamVector& theta, const TwinData& data) {
  Eigen::VectorXd grad;
  twins_eval(theta, data, &grad);
  return grad;
}

Eigen::VectorXd negloglik_gradient(const ParamVector& theta, const TrioData& data) {
  Eigen::VectorXd grad;
  if (trios_eval(theta, data, &grad, /*throw_on_indefinite=*/true) == kInf)
    throw definiteness_error("trio component covariance is not positive definite");
  return grad;
}

double negloglik_eval(const ParamVector& theta, const TwinData& data,
                      Eigen::VectorXd* grad) {
  return twins_eval(theta, data, grad);
}

double negloglik_eval(const ParamVector& theta, const TrioData& data,
                      Eigen::VectorXd* grad) {
  return trios_eval(theta, data, grad, /*throw_on_indefinite=*/false);
}

}  // namespace herit
