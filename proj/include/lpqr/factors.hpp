#pragma once

#include "lpqr/panel.hpp"

namespace lpqr {

/// pi ~= loadings * factors', with the singular values folded into the loadings.
struct FactorDecomposition {
  Matrix loadings;  // n x r
  Matrix factors;   // T x r, orthonormal columns
  Vector singular_values;
  int rank = 0;
};

/// Top-`rank` SVD of pi. Each factor column is sign-normalized so that its
/// largest-magnitude entry is positive. A zero pi yields zero loadings.
FactorDecomposition extract_factors(const Matrix& pi, int rank);

/// Percentage of sum sigma_k^2 carried by each component.
Vector variance_explained(const Vector& singular_values);

/// min over orthonormal O of ||a*O - b||_F, via the SVD of a'b.
double procrustes_distance(const Matrix& a, const Matrix& b);

}  // namespace lpqr
