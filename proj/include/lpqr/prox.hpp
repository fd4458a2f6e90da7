#pragma once

#include "lpqr/panel.hpp"

namespace lpqr {

/// Thin SVD m = U * diag(s) * V', singular values descending.
struct ThinSvd {
  Matrix u;
  Vector s;
  Matrix v;
};

/// Dense divide-and-conquer SVD. Throws SvdFailure if LAPACK does not converge.
ThinSvd thin_svd(const Matrix& m);

struct SvtResult {
  Matrix matrix;
  int rank = 0;
  Vector singular_values_before;
  Vector singular_values_after;
};

/// Elementwise argmin_v kappa * rho_tau(v) + 0.5 * (v - a)^2.
Matrix prox_pinball(const Matrix& a, double tau, double kappa);

/// Elementwise argmin_v v^2 / nT + (eta/2) * (v - a)^2.
Matrix prox_squared(const Matrix& a, double eta, double n_times_t);

/// result[j] = sign(v[j]) * max(|v[j]| - thresholds[j], 0).
Vector soft_threshold(const Vector& v, const Vector& thresholds);

/// Proximal map of threshold * ||.||_*: shrinks every singular value by threshold.
SvtResult singular_value_threshold(const Matrix& m, double threshold);

}  // namespace lpqr
