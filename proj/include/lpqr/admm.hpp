#pragma once

#include <Eigen/Cholesky>

#include "lpqr/panel.hpp"

namespace lpqr {

/// Column-standardized design and the Cholesky factor of (Xs'Xs + I_p), shared
/// by every fit on one dataset.
///
/// The solver works in standardized coordinates theta_s = d .* theta with
/// Xs = X * diag(1/d), d_j the root mean square of column j (1 for an all-zero
/// column). The minimizer is unchanged; the theta update is much better
/// conditioned when covariates live on very different scales.
class GramCache {
 public:
  GramCache() = default;
  explicit GramCache(const PanelData& data);

  Vector solve(const Vector& rhs) const { return llt_.solve(rhs); }
  Eigen::Index p() const { return p_; }
  const Vector& column_scale() const { return d_; }
  const Matrix& design() const { return design_; }

 private:
  Eigen::LLT<Matrix> llt_;
  Matrix design_;
  Vector d_;
  Eigen::Index p_ = 0;
};

/// Primal, slack and scaled dual variables of the splitting
///   V = W,  W = Y - X theta - Z_pi,  Z_pi = Pi,  Z_theta = theta.
/// The *_prev members hold the slack block of the previous sweep and feed the
/// dual residual. theta, z_theta and u_theta are in the standardized
/// coordinates of the GramCache they were produced with. For p = 0 only pi,
/// z_pi and u_pi are used.
struct AdmmState {
  Vector theta;
  Matrix pi;
  Matrix v;
  Matrix w;
  Vector z_theta;
  Matrix z_pi;
  Matrix u_v;
  Matrix u_w;
  Matrix u_pi;
  Vector u_theta;

  Matrix w_prev;
  Matrix z_pi_prev;
  Vector z_theta_prev;

  static AdmmState zeros(Eigen::Index n, Eigen::Index t_len, Eigen::Index p);
  bool matches(const PanelData& data) const;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
};

/// Norm of the stacked constraint violations and eta times the norm of the
/// slack-block change since the previous sweep.
Residuals admm_residuals(const AdmmState& state, const PanelData& data, const GramCache& gram,
                         double eta);

struct ZwSolution {
  Matrix z_pi;
  Matrix w;
};

/// Exact minimizer over (Z, W) of ||W + Z + A||^2 + ||W + B||^2 + ||Z + C||^2.
ZwSolution solve_zw_joint(const Matrix& a_tilde, const Matrix& b_tilde,
                          const Matrix& c_tilde);

/// Cold-start fit from the all-zero state. Routes p = 0 to fit_no_covariates.
QuantileFit fit(const PanelData& data, const SolverConfig& config,
                const ColumnScales& scales);

/// Warm-start fit: iterates from `state` and leaves the final iterate in it.
QuantileFit fit(const PanelData& data, const SolverConfig& config,
                const ColumnScales& scales, const GramCache& gram, AdmmState& state);

/// Nuclear-norm-only problem (no covariates). Reports Z_pi as the estimate.
QuantileFit fit_no_covariates(const Matrix& y, const SolverConfig& config);
QuantileFit fit_no_covariates(const Matrix& y, const SolverConfig& config,
                              AdmmState& state);

}  // namespace lpqr
