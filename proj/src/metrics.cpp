#include "lpqr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lpqr/error.hpp"

namespace lpqr {

double quantile_error(const Matrix& true_surface, const Matrix& est_surface) {
  if (true_surface.rows() != est_surface.rows() || true_surface.cols() != est_surface.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "quantile_error: surfaces differ in shape");
  }
  return (true_surface - est_surface).squaredNorm() / static_cast<double>(true_surface.size());
}

double theta_error_scaled(const Vector& theta_hat, const Vector& theta_true) {
  if (theta_hat.size() != theta_true.size()) {
    throw Error(ErrorKind::LengthMismatch, "theta_error_scaled: length mismatch");
  }
  return (theta_hat - theta_true).squaredNorm() / 1e-4;
}

SupportCounts support_recovery(const Vector& theta_hat, const Vector& theta_true) {
  if (theta_hat.size() != theta_true.size()) {
    throw Error(ErrorKind::LengthMismatch, "support_recovery: length mismatch");
  }
  auto support = [](const Vector& v) {
    std::vector<bool> s(static_cast<std::size_t>(v.size()), false);
    if (v.size() == 0) return s;
    const double floor = 1e-8 * std::max(1.0, v.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < v.size(); ++j) s[static_cast<std::size_t>(j)] = std::abs(v[j]) > floor;
    return s;
  };
  const auto est = support(theta_hat);
  const auto truth = support(theta_true);
  SupportCounts c;
  for (std::size_t j = 0; j < est.size(); ++j) {
    if (est[j] && truth[j]) ++c.true_positives;
    if (est[j] && !truth[j]) ++c.false_positives;
    if (!est[j] && truth[j]) ++c.false_negatives;
  }
  return c;
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::L1NnQr: return "l1nnqr";
    case Method::L1Qr: return "l1qr";
    case Method::L1NnLs: return "l1nnls";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "l1nnqr") return Method::L1NnQr;
  if (text == "l1qr") return Method::L1Qr;
  if (text == "l1nnls") return Method::L1NnLs;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(text) + "'");
}

namespace {

struct MethodAccumulator {
  // metrics[g][r]: value at grid point g in rep r (NaN when that fit did not converge)
  std::vector<std::vector<double>> theta_by_grid;
  std::vector<std::vector<double>> quantile_by_grid;
  std::vector<double> oracle_theta, oracle_quantile;
  std::vector<double> bic_theta, bic_quantile;
  int failed = 0;
};

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

McReport make_report(std::string name, const DesignSpec& spec, int failed,
                     std::vector<double> theta, std::vector<double> quantile) {
  McReport r;
  r.method = std::move(name);
  r.design = spec.design;
  r.n = spec.n;
  r.p = spec.p;
  r.t_len = spec.t_len;
  r.reps = static_cast<int>(theta.size());
  r.failed_reps = failed;
  r.mean_theta_err_scaled = mean(theta);
  r.mean_quantile_err = mean(quantile);
  r.per_rep_theta_err = std::move(theta);
  r.per_rep_quantile_err = std::move(quantile);
  return r;
}

double best_grid_mean(const std::vector<std::vector<double>>& by_grid) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& values : by_grid) {
    if (values.empty()) continue;
    double total = 0.0;
    bool complete = true;
    for (double v : values) {
      if (std::isnan(v)) { complete = false; break; }
      total += v;
    }
    if (complete) best = std::min(best, total / static_cast<double>(values.size()));
  }
  return best;
}

}  // namespace

std::vector<McReport> run_monte_carlo(const DesignSpec& spec, const std::vector<Method>& methods,
                                      const TuningGrid& grid_in, int reps, bool oracle_tuning,
                                      const McOptions& options) {
  if (reps < 1) throw Error(ErrorKind::InvalidArgument, "reps must be >= 1");
  if (methods.empty()) throw Error(ErrorKind::InvalidArgument, "no methods requested");
  TuningGrid grid = grid_in;
  grid.normalize();

  std::vector<MethodAccumulator> acc(methods.size());
  for (int rep = 0; rep < reps; ++rep) {
    DesignSpec rep_spec = spec;
    rep_spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(rep));
    const SimInstance inst = generate(rep_spec);
    const ColumnScales scales = compute_column_scales(inst.data);
    const double c1 = options.c1 > 0.0 ? options.c1 : default_c1(inst.data);

    for (std::size_t m = 0; m < methods.size(); ++m) {
      SolverConfig cfg = options.base;
      TuningGrid method_grid = grid;
      cfg.fix_pi_zero = methods[m] == Method::L1Qr;
      cfg.loss = methods[m] == Method::L1NnLs ? LossKind::Squared : LossKind::Quantile;
      if (cfg.fix_pi_zero) method_grid.nu2_values.resize(1);

      MethodAccumulator& a = acc[m];
      const std::size_t grid_size =
          method_grid.nu1_values.size() * method_grid.nu2_values.size();
      a.theta_by_grid.resize(grid_size);
      a.quantile_by_grid.resize(grid_size);

      std::vector<double> rep_theta, rep_quantile;
      auto visit = [&](const SelectionRow& row, const QuantileFit& f) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double te = theta_error_scaled(f.theta, inst.theta_true);
        const double qe = quantile_error(inst.true_median_surface,
                                         inst.data.linear_part(f.theta) + f.pi);
        rep_theta.push_back(row.converged ? te : nan);
        rep_quantile.push_back(row.converged ? qe : nan);
      };
      try {
        const SelectionReport sel =
            grid_search(inst.data, method_grid, cfg, scales, c1, visit);
        double best_te = std::numeric_limits<double>::infinity(), best_qe = best_te;
        for (std::size_t g = 0; g < grid_size; ++g) {
          a.theta_by_grid[g].push_back(rep_theta[g]);
          a.quantile_by_grid[g].push_back(rep_quantile[g]);
          if (!std::isnan(rep_theta[g])) {
            best_te = std::min(best_te, rep_theta[g]);
            best_qe = std::min(best_qe, rep_quantile[g]);
          }
        }
        a.oracle_theta.push_back(best_te);
        a.oracle_quantile.push_back(best_qe);
        a.bic_theta.push_back(theta_error_scaled(sel.best_fit.theta, inst.theta_true));
        a.bic_quantile.push_back(quantile_error(
            inst.true_median_surface, inst.data.linear_part(sel.best_fit.theta) + sel.best_fit.pi));
      } catch (const Error&) {
        ++a.failed;
      }
      if (options.on_rep_done) options.on_rep_done(rep, methods[m]);
    }
  }

  std::vector<McReport> out;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodAccumulator& a = acc[m];
    const std::string name(method_name(methods[m]));
    if (oracle_tuning) {
      McReport r = make_report(name, spec, a.failed, a.oracle_theta, a.oracle_quantile);
      r.grid_oracle_theta_err = best_grid_mean(a.theta_by_grid);
      r.grid_oracle_quantile_err = best_grid_mean(a.quantile_by_grid);
      out.push_back(std::move(r));
    }
    if (!oracle_tuning || options.with_bic_rows) {
      out.push_back(make_report("bic-" + name, spec, a.failed, a.bic_theta, a.bic_quantile));
    }
  }
  return out;
}

}  // namespace lpqr
