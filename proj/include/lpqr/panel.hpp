#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace lpqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Balanced panel: response Y (n x T) and covariates X (n x T x p).
///
/// Covariates are stored as an (n*T) x p design matrix whose row for
/// observation (i, t) is i + n*t, i.e. the column-major flattening of an
/// n x T matrix. With that layout X*theta maps directly onto an n x T matrix.
class PanelData {
 public:
  PanelData() = default;
  /// Throws NonFiniteInput / DimensionMismatch on invalid input.
  PanelData(Matrix y, Matrix design);
  /// Convenience constructor from per-covariate n x T slices.
  static PanelData from_slices(Matrix y, const std::vector<Matrix>& slices);

  Eigen::Index n() const { return y_.rows(); }
  Eigen::Index t_len() const { return y_.cols(); }
  Eigen::Index p() const { return design_.cols(); }
  Eigen::Index size() const { return y_.size(); }

  const Matrix& y() const { return y_; }
  const Matrix& design() const { return design_; }
  double x(Eigen::Index i, Eigen::Index t, Eigen::Index j) const {
    return design_(i + n() * t, j);
  }
  /// n x T slice of covariate j.
  Matrix slice(Eigen::Index j) const;
  /// X*theta reshaped to n x T.
  Matrix linear_part(const Vector& theta) const;

 private:
  Matrix y_;
  Matrix design_;
};

/// Empirical covariate scales; sigma_hat[j]^2 = mean over (i,t) of X[i,t,j]^2.
struct ColumnScales {
  Vector sigma_hat;

  static ColumnScales unit(Eigen::Index p) { return {Vector::Ones(p)}; }
};

enum class LossKind { Quantile, Squared };

struct SolverConfig {
  double tau = 0.5;
  double nu1 = 0.0;
  double nu2 = 0.0;
  /// ADMM penalty. Unset means 1 / (n*T), which matches the 1/(nT) scale of
  /// the loss term.
  std::optional<double> eta;
  int max_iter = 5000;
  double tol_abs = 1e-6;
  double tol_rel = 1e-5;
  LossKind loss = LossKind::Quantile;
  bool fix_pi_zero = false;
  std::optional<double> pi_inf_bound;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
  double resolved_eta(Eigen::Index n_times_t) const {
    return eta ? *eta : 1.0 / static_cast<double>(n_times_t);
  }
};

struct QuantileFit {
  double tau = 0.5;
  Vector theta;
  Matrix pi;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int rank_estimate = 0;
  int sparsity_estimate = 0;
  Vector singular_values;
};

ColumnScales compute_column_scales(const PanelData& data);

inline double pinball_loss(double residual, double tau) {
  return (tau - (residual <= 0.0 ? 1.0 : 0.0)) * residual;
}

/// Sum of pinball (or squared) losses of Y - X*theta - pi, unnormalized.
double loss_sum(const PanelData& data, const Vector& theta, const Matrix& pi,
                double tau, LossKind loss = LossKind::Quantile);

double nuclear_norm(const Matrix& m);

/// (1/nT) * loss + nu1 * sum_j sigma_j |theta_j| + nu2 * ||pi||_*.
double penalized_objective(const PanelData& data, const Vector& theta,
                           const Matrix& pi, const SolverConfig& config,
                           const ColumnScales& scales);

}  // namespace lpqr
