#include "lpqr/panel.hpp"

#include <cmath>
#include <string>

#include "lpqr/error.hpp"
#include "lpqr/prox.hpp"

namespace lpqr {

PanelData::PanelData(Matrix y, Matrix design)
    : y_(std::move(y)), design_(std::move(design)) {
  if (y_.rows() < 1 || y_.cols() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "panel needs n >= 1 and T >= 1");
  }
  if (design_.rows() != y_.size()) {
    if (design_.cols() == 0) {
      design_.resize(y_.size(), 0);
    } else {
      throw Error(ErrorKind::DimensionMismatch,
                  "design has " + std::to_string(design_.rows()) +
                      " rows, expected n*T = " + std::to_string(y_.size()));
    }
  }
  if (!y_.allFinite() || !design_.allFinite()) {
    throw Error(ErrorKind::NonFiniteInput, "panel contains non-finite values");
  }
}

PanelData PanelData::from_slices(Matrix y, const std::vector<Matrix>& slices) {
  Matrix design(y.size(), static_cast<Eigen::Index>(slices.size()));
  for (std::size_t j = 0; j < slices.size(); ++j) {
    if (slices[j].rows() != y.rows() || slices[j].cols() != y.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "covariate slice shape differs from Y");
    }
    design.col(static_cast<Eigen::Index>(j)) = slices[j].reshaped();
  }
  return PanelData(std::move(y), std::move(design));
}

Matrix PanelData::slice(Eigen::Index j) const {
  return design_.col(j).reshaped(n(), t_len());
}

Matrix PanelData::linear_part(const Vector& theta) const {
  if (theta.size() != p()) {
    throw Error(ErrorKind::DimensionMismatch, "theta length differs from p");
  }
  if (p() == 0) return Matrix::Zero(n(), t_len());
  Vector flat = design_ * theta;
  return flat.reshaped(n(), t_len());
}

void SolverConfig::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "tau must lie in (0, 1)");
  }
  if (!(nu1 >= 0.0) || !(nu2 >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "penalties must be nonnegative");
  }
  if (eta && (!(*eta > 0.0) || !std::isfinite(*eta))) {
    throw Error(ErrorKind::InvalidArgument, "eta must be positive");
  }
  if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
  if (!(tol_abs > 0.0) || !(tol_rel > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
  }
  if (pi_inf_bound && !(*pi_inf_bound > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "pi_inf_bound must be positive");
  }
}

ColumnScales compute_column_scales(const PanelData& data) {
  if (data.p() < 1) {
    throw Error(ErrorKind::InvalidArgument, "column scales need p >= 1");
  }
  const double count = static_cast<double>(data.size());
  Vector sigma = (data.design().colwise().squaredNorm().transpose() / count).cwiseSqrt();
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    if (!(sigma[j] > 0.0)) {
      throw Error(ErrorKind::DegenerateColumn,
                  "covariate " + std::to_string(j + 1) + " is identically zero");
    }
  }
  return {std::move(sigma)};
}

double loss_sum(const PanelData& data, const Vector& theta, const Matrix& pi,
                double tau, LossKind loss) {
  if (pi.rows() != data.n() || pi.cols() != data.t_len()) {
    throw Error(ErrorKind::DimensionMismatch, "pi shape differs from Y");
  }
  const Matrix resid = data.y() - data.linear_part(theta) - pi;
  if (loss == LossKind::Squared) return resid.squaredNorm();
  double total = 0.0;
  for (Eigen::Index k = 0; k < resid.size(); ++k) {
    total += pinball_loss(resid.data()[k], tau);
  }
  return total;
}

double nuclear_norm(const Matrix& m) {
  if (m.size() == 0 || m.isZero(0.0)) return 0.0;
  return thin_svd(m).s.sum();
}

double penalized_objective(const PanelData& data, const Vector& theta,
                           const Matrix& pi, const SolverConfig& config,
                           const ColumnScales& scales) {
  if (scales.sigma_hat.size() != data.p()) {
    throw Error(ErrorKind::DimensionMismatch, "scales length differs from p");
  }
  const double fit = loss_sum(data, theta, pi, config.tau, config.loss) /
                     static_cast<double>(data.size());
  const double l1 = data.p() > 0 ? scales.sigma_hat.dot(theta.cwiseAbs()) : 0.0;
  return fit + config.nu1 * l1 + config.nu2 * nuclear_norm(pi);
}

}  // namespace lpqr
