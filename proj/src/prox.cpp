#include "lpqr/prox.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "lpqr/error.hpp"

namespace lpqr {

ThinSvd thin_svd(const Matrix& m) {
  const lapack_int rows = static_cast<lapack_int>(m.rows());
  const lapack_int cols = static_cast<lapack_int>(m.cols());
  const lapack_int k = std::min(rows, cols);
  ThinSvd out{Matrix(rows, k), Vector(k), Matrix(cols, k)};
  if (k == 0) return out;
  if (!m.allFinite()) {
    throw Error(ErrorKind::NonFiniteInput, "SVD input has non-finite entries");
  }
  Matrix a = m;
  Matrix vt(k, cols);
  const lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, a.data(), rows, out.s.data(),
                     out.u.data(), rows, vt.data(), k);
  if (info != 0) {
    throw Error(ErrorKind::SvdFailure, "dgesdd failed with info " + std::to_string(info));
  }
  out.v = vt.transpose();
  return out;
}

Matrix prox_pinball(const Matrix& a, double tau, double kappa) {
  if (!a.allFinite()) {
    throw Error(ErrorKind::NonFiniteInput, "prox_pinball input has non-finite entries");
  }
  const double upper = tau * kappa;
  const double lower = (1.0 - tau) * kappa;
  return a.unaryExpr([upper, lower](double x) {
    if (x > upper) return x - upper;
    if (x < -lower) return x + lower;
    return 0.0;
  });
}

Matrix prox_squared(const Matrix& a, double eta, double n_times_t) {
  return a * (eta / (eta + 2.0 / n_times_t));
}

Vector soft_threshold(const Vector& v, const Vector& thresholds) {
  if (v.size() != thresholds.size()) {
    throw Error(ErrorKind::LengthMismatch, "soft_threshold: length mismatch");
  }
  Vector out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double mag = std::max(std::abs(v[j]) - thresholds[j], 0.0);
    out[j] = v[j] < 0.0 ? -mag : (v[j] > 0.0 ? mag : 0.0);
  }
  return out;
}

SvtResult singular_value_threshold(const Matrix& m, double threshold) {
  SvtResult out;
  const Eigen::Index k = std::min(m.rows(), m.cols());
  if (m.isZero(0.0)) {
    out.matrix = Matrix::Zero(m.rows(), m.cols());
    out.singular_values_before = Vector::Zero(k);
    out.singular_values_after = Vector::Zero(k);
    return out;
  }
  ThinSvd svd = thin_svd(m);
  out.singular_values_before = svd.s;
  out.singular_values_after = (svd.s.array() - threshold).cwiseMax(0.0).matrix();
  const double floor = 1e-12 * svd.s[0];
  Eigen::Index rank = 0;
  while (rank < k && out.singular_values_after[rank] > floor) ++rank;
  // anything past the counted rank is numerically zero
  out.singular_values_after.tail(k - rank).setZero();
  out.rank = static_cast<int>(rank);
  out.matrix = svd.u.leftCols(rank) * out.singular_values_after.head(rank).asDiagonal() *
               svd.v.leftCols(rank).transpose();
  return out;
}

}  // namespace lpqr
