#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lpqr/panel.hpp"
#include "lpqr/select.hpp"
#include "lpqr/sim.hpp"

namespace lpqr {

/// (1/nT) * sum (true - est)^2.
double quantile_error(const Matrix& true_surface, const Matrix& est_surface);

/// ||theta_hat - theta_true||^2 / 1e-4.
double theta_error_scaled(const Vector& theta_hat, const Vector& theta_true);

struct SupportCounts {
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
};

/// Support comparison using the estimate_sparsity zero rule on both vectors.
SupportCounts support_recovery(const Vector& theta_hat, const Vector& theta_true);

enum class Method {
  L1NnQr,  // pinball loss, l1 + nuclear penalties
  L1Qr,    // pinball loss, l1 only (Pi fixed at zero)
  L1NnLs,  // squared loss, l1 + nuclear penalties
};

std::string_view method_name(Method m);
/// Accepts l1nnqr, l1qr, l1nnls.
Method parse_method(std::string_view text);

struct McReport {
  std::string method;  // "l1nnqr", or "bic-l1nnqr" for BIC-selected rows
  Design design = Design::D1;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::Index t_len = 0;
  int reps = 0;  // reps that contributed
  int failed_reps = 0;
  double mean_theta_err_scaled = 0.0;
  double mean_quantile_err = 0.0;
  std::vector<double> per_rep_theta_err;
  std::vector<double> per_rep_quantile_err;
  /// Oracle rows only: min over grid points of the rep-averaged metric.
  double grid_oracle_theta_err = 0.0;
  double grid_oracle_quantile_err = 0.0;
};

struct McOptions {
  SolverConfig base;  // tau, eta, tolerances; penalties come from the grid
  double c1 = 0.0;    // <= 0 selects log(nT)^2
  /// With oracle tuning, also emit a BIC-selected row per method from the same fits.
  bool with_bic_rows = false;
  std::function<void(int rep, Method method)> on_rep_done;
};

/// Rep r draws its instance with seed derive_seed(spec.seed, r). For every
/// method the whole grid is fitted (L1Qr only walks nu1). Oracle tuning keeps,
/// per rep and per metric, the best grid value; otherwise the BIC-selected
/// fit's metrics are kept. Reps whose fits all fail are skipped and counted.
std::vector<McReport> run_monte_carlo(const DesignSpec& spec, const std::vector<Method>& methods,
                                      const TuningGrid& grid, int reps, bool oracle_tuning,
                                      const McOptions& options = {});

}  // namespace lpqr
