#include "lpqr/admm.hpp"

#include <algorithm>
#include <cmath>

#include "lpqr/error.hpp"
#include "lpqr/prox.hpp"
#include "lpqr/select.hpp"

namespace lpqr {

GramCache::GramCache(const PanelData& data) : p_(data.p()) {
  d_ = Vector::Ones(p_);
  const double nt = static_cast<double>(data.size());
  for (Eigen::Index j = 0; j < p_; ++j) {
    const double rms = data.design().col(j).norm() / std::sqrt(nt);
    if (rms > 0.0) d_[j] = rms;
  }
  design_ = data.design() * d_.cwiseInverse().asDiagonal();
  Matrix gram = Matrix::Identity(p_, p_);
  if (p_ > 0) gram.selfadjointView<Eigen::Lower>().rankUpdate(design_.transpose());
  llt_.compute(gram.selfadjointView<Eigen::Lower>());
}

AdmmState AdmmState::zeros(Eigen::Index n, Eigen::Index t_len, Eigen::Index p) {
  AdmmState s;
  s.theta = Vector::Zero(p);
  s.z_theta = Vector::Zero(p);
  s.u_theta = Vector::Zero(p);
  s.z_theta_prev = Vector::Zero(p);
  for (Matrix* m : {&s.pi, &s.v, &s.w, &s.z_pi, &s.u_v, &s.u_w, &s.u_pi, &s.w_prev,
                    &s.z_pi_prev}) {
    *m = Matrix::Zero(n, t_len);
  }
  return s;
}

bool AdmmState::matches(const PanelData& data) const {
  return theta.size() == data.p() && pi.rows() == data.n() && pi.cols() == data.t_len() &&
         w.rows() == data.n() && w.cols() == data.t_len();
}

Residuals admm_residuals(const AdmmState& s, const PanelData& data, const GramCache& gram,
                         double eta) {
  const Matrix xb = (gram.design() * s.theta).reshaped(data.n(), data.t_len());
  const double primal_sq = (s.v - s.w).squaredNorm() +
                           (s.w - data.y() + xb + s.z_pi).squaredNorm() +
                           (s.z_pi - s.pi).squaredNorm() +
                           (s.z_theta - s.theta).squaredNorm();
  const double dual_sq = (s.w - s.w_prev).squaredNorm() +
                         (s.z_pi - s.z_pi_prev).squaredNorm() +
                         (s.z_theta - s.z_theta_prev).squaredNorm();
  return {std::sqrt(primal_sq), eta * std::sqrt(dual_sq)};
}

ZwSolution solve_zw_joint(const Matrix& a_tilde, const Matrix& b_tilde,
                          const Matrix& c_tilde) {
  if (a_tilde.rows() != b_tilde.rows() || a_tilde.cols() != b_tilde.cols() ||
      a_tilde.rows() != c_tilde.rows() || a_tilde.cols() != c_tilde.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "solve_zw_joint: shapes differ");
  }
  ZwSolution out;
  out.z_pi = (-a_tilde - 2.0 * c_tilde + b_tilde) / 3.0;
  out.w = -a_tilde - c_tilde - 2.0 * out.z_pi;
  return out;
}

namespace {

double max_norm(std::initializer_list<double> values) {
  return *std::max_element(values.begin(), values.end());
}

void check_finite(const AdmmState& s, int iteration) {
  if (!s.theta.allFinite() || !s.w.allFinite() || !s.z_pi.allFinite() ||
      !s.u_w.allFinite()) {
    throw Error(ErrorKind::NonFiniteIterate,
                "ADMM iterate became non-finite at sweep " + std::to_string(iteration) +
                    "; try a different eta");
  }
}

void finish(QuantileFit& out, const Vector& spectrum) {
  out.singular_values = spectrum;
  out.rank_estimate = estimate_rank(spectrum);
  out.sparsity_estimate = estimate_sparsity(out.theta);
}

}  // namespace

QuantileFit fit(const PanelData& data, const SolverConfig& config,
                const ColumnScales& scales) {
  if (data.p() == 0) return fit_no_covariates(data.y(), config);
  const GramCache gram(data);
  AdmmState state = AdmmState::zeros(data.n(), data.t_len(), data.p());
  return fit(data, config, scales, gram, state);
}

QuantileFit fit(const PanelData& data, const SolverConfig& config,
                const ColumnScales& scales, const GramCache& gram, AdmmState& s) {
  config.validate();
  if (data.p() == 0) return fit_no_covariates(data.y(), config, s);
  if (scales.sigma_hat.size() != data.p() || gram.p() != data.p()) {
    throw Error(ErrorKind::DimensionMismatch, "scales or gram cache do not match p");
  }
  if (!s.matches(data)) s = AdmmState::zeros(data.n(), data.t_len(), data.p());

  const double eta = config.resolved_eta(data.size());
  const double nt = static_cast<double>(data.size());
  const double kappa = 1.0 / (nt * eta);
  const Vector l1_thresholds =
      scales.sigma_hat.cwiseQuotient(gram.column_scale()) * (config.nu1 / eta);
  const Matrix& xs = gram.design();
  const double svt_threshold = config.nu2 / eta;
  const double sqrt_m = std::sqrt(3.0 * nt + static_cast<double>(data.p()));
  const Matrix& y = data.y();

  if (config.fix_pi_zero) {
    s.pi.setZero();
    s.z_pi.setZero();
    s.u_pi.setZero();
  }

  QuantileFit out;
  out.tau = config.tau;
  Vector spectrum = Vector::Zero(std::min(data.n(), data.t_len()));
  Residuals res;
  int iter = 0;
  while (iter < config.max_iter) {
    ++iter;
    s.w_prev = s.w;
    s.z_pi_prev = s.z_pi;
    s.z_theta_prev = s.z_theta;

    // first block: (V, theta, Pi), separable given the slack block
    if (config.loss == LossKind::Quantile) {
      s.v = prox_pinball(s.w - s.u_v, config.tau, kappa);
    } else {
      s.v = prox_squared(s.w - s.u_v, eta, nt);
    }
    {
      const Matrix a = s.w + s.z_pi + s.u_w - y;
      const Vector rhs = -(xs.transpose() * a.reshaped()) + s.z_theta + s.u_theta;
      s.theta = gram.solve(rhs);
    }
    if (!config.fix_pi_zero) {
      SvtResult svt = singular_value_threshold(s.z_pi + s.u_pi, svt_threshold);
      s.pi = std::move(svt.matrix);
      spectrum = std::move(svt.singular_values_after);
      if (config.pi_inf_bound) {
        const double c = *config.pi_inf_bound;
        s.pi = s.pi.cwiseMax(-c).cwiseMin(c);
      }
    }

    // second block: Z_theta, then (Z_pi, W) jointly
    s.z_theta = soft_threshold(s.theta - s.u_theta, l1_thresholds);
    const Matrix xb = (xs * s.theta).reshaped(data.n(), data.t_len());
    const Matrix a_tilde = -y + xb + s.u_w;
    const Matrix b_tilde = -s.v - s.u_v;
    if (config.fix_pi_zero) {
      s.w = -(a_tilde + b_tilde) / 2.0;
    } else {
      ZwSolution zw = solve_zw_joint(a_tilde, b_tilde, s.u_pi - s.pi);
      s.z_pi = std::move(zw.z_pi);
      s.w = std::move(zw.w);
    }

    s.u_v += s.v - s.w;
    s.u_w += s.w - y + xb + s.z_pi;
    s.u_pi += s.z_pi - s.pi;
    s.u_theta += s.z_theta - s.theta;
    check_finite(s, iter);

    const double primal_sq = (s.v - s.w).squaredNorm() +
                             (s.w - y + xb + s.z_pi).squaredNorm() +
                             (s.z_pi - s.pi).squaredNorm() +
                             (s.z_theta - s.theta).squaredNorm();
    const double dual_sq = (s.w - s.w_prev).squaredNorm() +
                           (s.z_pi - s.z_pi_prev).squaredNorm() +
                           (s.z_theta - s.z_theta_prev).squaredNorm();
    res = {std::sqrt(primal_sq), eta * std::sqrt(dual_sq)};

    const double eps_primal =
        config.tol_abs * sqrt_m +
        config.tol_rel * max_norm({s.v.norm(), s.w.norm(), y.norm(), xb.norm(),
                                   s.z_pi.norm(), s.pi.norm(), s.theta.norm()});
    const double eps_dual =
        config.tol_abs * sqrt_m +
        config.tol_rel * eta *
            std::sqrt(s.u_v.squaredNorm() + s.u_w.squaredNorm() + s.u_pi.squaredNorm() +
                      s.u_theta.squaredNorm());
    if (res.primal <= eps_primal && res.dual <= eps_dual) {
      out.converged = true;
      break;
    }
  }

  out.iterations = iter;
  out.primal_residual = res.primal;
  out.dual_residual = res.dual;
  out.theta = s.z_theta.cwiseQuotient(gram.column_scale());
  out.pi = s.pi;
  finish(out, spectrum);

  const double fit_term = loss_sum(data, out.theta, out.pi, config.tau, config.loss) / nt;
  out.objective = fit_term + config.nu1 * scales.sigma_hat.dot(out.theta.cwiseAbs()) +
                  (config.fix_pi_zero ? 0.0 : config.nu2 * spectrum.sum());
  if (config.pi_inf_bound) {
    out.objective = penalized_objective(data, out.theta, out.pi, config, scales);
  }
  return out;
}

QuantileFit fit_no_covariates(const Matrix& y, const SolverConfig& config) {
  AdmmState state = AdmmState::zeros(y.rows(), y.cols(), 0);
  return fit_no_covariates(y, config, state);
}

QuantileFit fit_no_covariates(const Matrix& y, const SolverConfig& config,
                              AdmmState& s) {
  config.validate();
  if (!y.allFinite()) throw Error(ErrorKind::NonFiniteInput, "Y has non-finite entries");
  if (s.pi.rows() != y.rows() || s.pi.cols() != y.cols()) {
    s = AdmmState::zeros(y.rows(), y.cols(), 0);
  }
  const double eta = config.resolved_eta(y.size());
  const double nt = static_cast<double>(y.size());
  const double kappa = 1.0 / (nt * eta);
  const double sqrt_m = std::sqrt(nt);

  QuantileFit out;
  out.tau = config.tau;
  out.theta = Vector::Zero(0);
  Vector spectrum = Vector::Zero(std::min(y.rows(), y.cols()));
  Residuals res;
  int iter = 0;
  while (iter < config.max_iter) {
    ++iter;
    s.z_pi_prev = s.z_pi;
    const Matrix target = y - s.z_pi + s.u_pi;
    if (config.loss == LossKind::Quantile) {
      s.pi = y - prox_pinball(target, config.tau, kappa);
    } else {
      s.pi = y - prox_squared(target, eta, nt);
    }
    SvtResult svt = singular_value_threshold(s.pi + s.u_pi, config.nu2 / eta);
    s.z_pi = std::move(svt.matrix);
    spectrum = std::move(svt.singular_values_after);
    if (config.pi_inf_bound) {
      const double c = *config.pi_inf_bound;
      s.z_pi = s.z_pi.cwiseMax(-c).cwiseMin(c);
    }
    s.u_pi += s.pi - s.z_pi;
    if (!s.z_pi.allFinite() || !s.u_pi.allFinite()) {
      throw Error(ErrorKind::NonFiniteIterate,
                  "ADMM iterate became non-finite at sweep " + std::to_string(iter));
    }

    res = {(s.pi - s.z_pi).norm(), eta * (s.z_pi - s.z_pi_prev).norm()};
    const double eps_primal =
        config.tol_abs * sqrt_m + config.tol_rel * std::max(s.pi.norm(), s.z_pi.norm());
    const double eps_dual = config.tol_abs * sqrt_m + config.tol_rel * eta * s.u_pi.norm();
    if (res.primal <= eps_primal && res.dual <= eps_dual) {
      out.converged = true;
      break;
    }
  }

  out.iterations = iter;
  out.primal_residual = res.primal;
  out.dual_residual = res.dual;
  out.pi = s.z_pi;
  finish(out, spectrum);

  double fit_term = 0.0;
  const Matrix resid = y - out.pi;
  for (Eigen::Index k = 0; k < resid.size(); ++k) {
    const double r = resid.data()[k];
    fit_term += config.loss == LossKind::Quantile ? pinball_loss(r, config.tau) : r * r;
  }
  out.objective = fit_term / nt + config.nu2 * (config.pi_inf_bound ? nuclear_norm(out.pi)
                                                                    : spectrum.sum());
  return out;
}

}  // namespace lpqr
