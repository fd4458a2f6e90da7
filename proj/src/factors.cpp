#include "lpqr/factors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lpqr/error.hpp"
#include "lpqr/prox.hpp"

namespace lpqr {

FactorDecomposition extract_factors(const Matrix& pi, int rank) {
  const Eigen::Index max_rank = std::min(pi.rows(), pi.cols());
  if (rank < 1 || rank > max_rank) {
    throw Error(ErrorKind::RankTooLarge, "rank " + std::to_string(rank) +
                                             " outside [1, " + std::to_string(max_rank) + "]");
  }
  FactorDecomposition out;
  out.rank = rank;
  if (pi.isZero(0.0)) {
    out.loadings = Matrix::Zero(pi.rows(), rank);
    out.factors = Matrix::Identity(pi.cols(), rank);
    out.singular_values = Vector::Zero(rank);
    return out;
  }
  const ThinSvd svd = thin_svd(pi);
  out.singular_values = svd.s.head(rank);
  out.factors = svd.v.leftCols(rank);
  out.loadings = svd.u.leftCols(rank) * out.singular_values.asDiagonal();
  for (int k = 0; k < rank; ++k) {
    Eigen::Index argmax = 0;
    out.factors.col(k).cwiseAbs().maxCoeff(&argmax);
    if (out.factors(argmax, k) < 0.0) {
      out.factors.col(k) *= -1.0;
      out.loadings.col(k) *= -1.0;
    }
  }
  return out;
}

Vector variance_explained(const Vector& singular_values) {
  const double total = singular_values.squaredNorm();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::AllZeroSpectrum, "spectrum is identically zero");
  }
  return singular_values.array().square() / total * 100.0;
}

double procrustes_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "procrustes_distance: shapes differ");
  }
  if (a.cols() > a.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "procrustes_distance: more columns than rows");
  }
  if (a.size() == 0) return 0.0;
  const Matrix cross = a.transpose() * b;
  Matrix rotation = Matrix::Identity(a.cols(), a.cols());
  if (!cross.isZero(0.0)) {
    const ThinSvd svd = thin_svd(cross);
    rotation = svd.u * svd.v.transpose();
  }
  return (a * rotation - b).norm();
}

}  // namespace lpqr
