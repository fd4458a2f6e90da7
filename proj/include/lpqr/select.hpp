#pragma once

#include <functional>
#include <vector>

#include "lpqr/panel.hpp"

namespace lpqr {

/// Count of |theta_j| > 1e-8 * max(1, max_k |theta_k|).
int estimate_sparsity(const Vector& theta);

/// Count of sigma_k > 1e-8 * max(1, sigma_1); expects a descending spectrum.
int estimate_rank(const Vector& singular_values);

/// Penalty grid. Both lists are kept sorted descending.
struct TuningGrid {
  std::vector<double> nu1_values;
  std::vector<double> nu2_values;

  /// nu1 in {1e-4, 1e-4.5, ..., 1e-8}, nu2 in {1e-3, 1e-4, ..., 1e-9}.
  static TuningGrid defaults();
  /// 10^hi, 10^(hi-step), ..., 10^lo.
  static std::vector<double> log10_range(double hi, double lo, double step);

  /// Sorts descending; throws InvalidArgument on empty lists or non-positive entries.
  void normalize();
};

struct SelectionRow {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double bic = 0.0;
  int sparsity = 0;
  int rank = 0;
  double objective = 0.0;
  bool converged = false;
};

struct SelectionReport {
  std::vector<SelectionRow> table;
  double best_nu1 = 0.0;
  double best_nu2 = 0.0;
  QuantileFit best_fit;
};

/// c1 = log(nT)^2.
double default_c1(const PanelData& data);

/// sum rho_tau(Y - X theta - Pi) + (log(nT)/2) * (c1 * s + (1 + n + T) * r).
double bic_score(const QuantileFit& fit, const PanelData& data, double c1);

/// Called with every grid fit, in evaluation order.
using GridVisitor = std::function<void(const SelectionRow&, const QuantileFit&)>;

/// Fits every (nu1, nu2) pair, warm-starting along nu2 within each nu1, and
/// returns the full table plus the minimum-BIC converged fit. Ties go to the
/// larger penalties. Throws AllFitsFailed if nothing converged.
SelectionReport grid_search(const PanelData& data, TuningGrid grid,
                            const SolverConfig& config, const ColumnScales& scales,
                            double c1, const GridVisitor& visit = {});

}  // namespace lpqr
