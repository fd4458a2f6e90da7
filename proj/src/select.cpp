#include "lpqr/select.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lpqr/admm.hpp"
#include "lpqr/error.hpp"

namespace lpqr {

int estimate_sparsity(const Vector& theta) {
  if (theta.size() == 0) return 0;
  const double floor = 1e-8 * std::max(1.0, theta.cwiseAbs().maxCoeff());
  return static_cast<int>((theta.array().abs() > floor).count());
}

int estimate_rank(const Vector& singular_values) {
  if (singular_values.size() == 0) return 0;
  const double floor = 1e-8 * std::max(1.0, singular_values[0]);
  return static_cast<int>((singular_values.array() > floor).count());
}

std::vector<double> TuningGrid::log10_range(double hi, double lo, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int k = 0; k < count; ++k) out.push_back(std::pow(10.0, hi - k * step));
  return out;
}

TuningGrid TuningGrid::defaults() {
  return {log10_range(-4.0, -8.0, 0.5), log10_range(-3.0, -9.0, 1.0)};
}

void TuningGrid::normalize() {
  for (auto* values : {&nu1_values, &nu2_values}) {
    if (values->empty()) throw Error(ErrorKind::InvalidArgument, "tuning grid is empty");
    for (double v : *values) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::InvalidArgument, "tuning grid entries must be positive");
      }
    }
    std::sort(values->begin(), values->end(), std::greater<>());
  }
}

double default_c1(const PanelData& data) {
  const double l = std::log(static_cast<double>(data.size()));
  return l * l;
}

double bic_score(const QuantileFit& fit, const PanelData& data, double c1) {
  const Vector theta = fit.theta.size() == data.p() ? fit.theta : Vector::Zero(data.p());
  const double fit_term = loss_sum(data, theta, fit.pi, fit.tau, LossKind::Quantile);
  const double nt = static_cast<double>(data.size());
  const double params = c1 * fit.sparsity_estimate +
                        static_cast<double>(1 + data.n() + data.t_len()) * fit.rank_estimate;
  return fit_term + std::log(nt) / 2.0 * params;
}

SelectionReport grid_search(const PanelData& data, TuningGrid grid,
                            const SolverConfig& config, const ColumnScales& scales,
                            double c1, const GridVisitor& visit) {
  grid.normalize();
  const GramCache gram(data);

  SelectionReport report;
  report.table.reserve(grid.nu1_values.size() * grid.nu2_values.size());
  bool have_best = false;
  double best_bic = 0.0;
  for (double nu1 : grid.nu1_values) {
    AdmmState state = AdmmState::zeros(data.n(), data.t_len(), data.p());
    for (double nu2 : grid.nu2_values) {
      SolverConfig cfg = config;
      cfg.nu1 = nu1;
      cfg.nu2 = nu2;
      QuantileFit fit = lpqr::fit(data, cfg, scales, gram, state);
      SelectionRow row{nu1, nu2, bic_score(fit, data, c1), fit.sparsity_estimate,
                       fit.rank_estimate, fit.objective, fit.converged};
      report.table.push_back(row);
      if (visit) visit(row, fit);
      // grid is walked from large to small penalties, so strict < keeps ties sparse
      if (row.converged && (!have_best || row.bic < best_bic)) {
        have_best = true;
        best_bic = row.bic;
        report.best_nu1 = nu1;
        report.best_nu2 = nu2;
        report.best_fit = std::move(fit);
      }
    }
  }
  if (!have_best) {
    throw Error(ErrorKind::AllFitsFailed, "no grid point converged");
  }
  return report;
}

}  // namespace lpqr
