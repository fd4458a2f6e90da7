#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lpqr/admm.hpp"
#include "lpqr/cli.hpp"
#include "lpqr/error.hpp"
#include "lpqr/factors.hpp"
#include "lpqr/metrics.hpp"
#include "lpqr/prox.hpp"
#include "lpqr/select.hpp"
#include "lpqr/sim.hpp"

namespace py = pybind11;
using namespace lpqr;

namespace {

SolverConfig make_config(double tau, double nu1, double nu2, std::optional<double> eta,
                         int max_iter, double tol_abs, double tol_rel, const std::string& loss,
                         bool fix_pi_zero, std::optional<double> pi_inf_bound) {
  SolverConfig c;
  c.tau = tau;
  c.nu1 = nu1;
  c.nu2 = nu2;
  c.eta = eta;
  c.max_iter = max_iter;
  c.tol_abs = tol_abs;
  c.tol_rel = tol_rel;
  if (loss == "quantile") c.loss = LossKind::Quantile;
  else if (loss == "squared") c.loss = LossKind::Squared;
  else throw Error(ErrorKind::InvalidArgument, "loss must be 'quantile' or 'squared'");
  c.fix_pi_zero = fix_pi_zero;
  c.pi_inf_bound = pi_inf_bound;
  c.validate();
  return c;
}

// y is n x T; x is n x T x p given as (n*T) x p with row i + n*t, or None.
PanelData make_panel(const Matrix& y, const std::optional<Matrix>& design) {
  return PanelData(y, design ? *design : Matrix::Zero(y.size(), 0));
}

ColumnScales scales_for(const PanelData& data, bool unit_weights) {
  if (data.p() == 0) return {Vector::Zero(0)};
  return unit_weights ? ColumnScales::unit(data.p()) : compute_column_scales(data);
}

#define SOLVER_ARGS                                                                       \
  py::arg("tau") = 0.5, py::arg("nu1") = 0.0, py::arg("nu2") = 0.0,                       \
  py::arg("eta") = py::none(), py::arg("max_iter") = 5000, py::arg("tol_abs") = 1e-6,     \
  py::arg("tol_rel") = 1e-5, py::arg("loss") = "quantile", py::arg("fix_pi_zero") = false, \
  py::arg("pi_inf_bound") = py::none()

}  // namespace

PYBIND11_MODULE(_lpqr, m) {
  m.doc() = "Penalized panel quantile regression with a low-rank latent part";

  static py::exception<Error> error_type(m, "LpqrError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, (std::string(error_kind_name(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<QuantileFit>(m, "QuantileFit")
      .def_readonly("tau", &QuantileFit::tau)
      .def_readonly("theta", &QuantileFit::theta)
      .def_readonly("pi", &QuantileFit::pi)
      .def_readonly("objective", &QuantileFit::objective)
      .def_readonly("iterations", &QuantileFit::iterations)
      .def_readonly("converged", &QuantileFit::converged)
      .def_readonly("primal_residual", &QuantileFit::primal_residual)
      .def_readonly("dual_residual", &QuantileFit::dual_residual)
      .def_readonly("rank", &QuantileFit::rank_estimate)
      .def_readonly("sparsity", &QuantileFit::sparsity_estimate)
      .def_readonly("singular_values", &QuantileFit::singular_values)
      .def("__repr__", [](const QuantileFit& f) {
        std::ostringstream s;
        s << "QuantileFit(tau=" << f.tau << ", rank=" << f.rank_estimate
          << ", sparsity=" << f.sparsity_estimate << ", objective=" << f.objective
          << ", converged=" << (f.converged ? "True" : "False") << ")";
        return s.str();
      });

  m.def(
      "fit",
      [](const Matrix& y, const std::optional<Matrix>& design, double tau, double nu1, double nu2,
         std::optional<double> eta, int max_iter, double tol_abs, double tol_rel,
         const std::string& loss, bool fix_pi_zero, std::optional<double> pi_inf_bound,
         bool unit_weights) {
        const PanelData data = make_panel(y, design);
        const SolverConfig cfg = make_config(tau, nu1, nu2, eta, max_iter, tol_abs, tol_rel,
                                             loss, fix_pi_zero, pi_inf_bound);
        py::gil_scoped_release release;
        return fit(data, cfg, scales_for(data, unit_weights));
      },
      py::arg("y"), py::arg("design") = py::none(), SOLVER_ARGS, py::arg("unit_weights") = false,
      "Fit one model. design is the (n*T) x p matrix whose row i + n*t holds X[i, t, :].");

  m.def(
      "grid_search",
      [](const Matrix& y, const Matrix& design, std::vector<double> nu1_values,
         std::vector<double> nu2_values, double tau, double c1, bool unit_weights) {
        const PanelData data = make_panel(y, design);
        TuningGrid grid = TuningGrid::defaults();
        if (!nu1_values.empty()) grid.nu1_values = std::move(nu1_values);
        if (!nu2_values.empty()) grid.nu2_values = std::move(nu2_values);
        SolverConfig cfg;
        cfg.tau = tau;
        cfg.validate();
        const double c = c1 > 0.0 ? c1 : default_c1(data);
        SelectionReport rep;
        {
          py::gil_scoped_release release;
          rep = grid_search(data, grid, cfg, scales_for(data, unit_weights), c);
        }
        py::list table;
        for (const SelectionRow& r : rep.table) {
          py::dict row;
          row["nu1"] = r.nu1;
          row["nu2"] = r.nu2;
          row["bic"] = r.bic;
          row["sparsity"] = r.sparsity;
          row["rank"] = r.rank;
          row["objective"] = r.objective;
          row["converged"] = r.converged;
          table.append(row);
        }
        py::dict out;
        out["table"] = table;
        out["best_nu1"] = rep.best_nu1;
        out["best_nu2"] = rep.best_nu2;
        out["best_fit"] = rep.best_fit;
        return out;
      },
      py::arg("y"), py::arg("design"), py::arg("nu1_values") = std::vector<double>{},
      py::arg("nu2_values") = std::vector<double>{}, py::arg("tau") = 0.5, py::arg("c1") = 0.0,
      py::arg("unit_weights") = false);

  m.def("prox_pinball", &prox_pinball, py::arg("a"), py::arg("tau"), py::arg("kappa"));
  m.def("soft_threshold", &soft_threshold, py::arg("v"), py::arg("thresholds"));
  m.def(
      "singular_value_threshold",
      [](const Matrix& a, double threshold) {
        const SvtResult r = singular_value_threshold(a, threshold);
        return py::make_tuple(r.matrix, r.rank);
      },
      py::arg("m"), py::arg("threshold"));
  m.def("solve_zw_joint", [](const Matrix& a, const Matrix& b, const Matrix& c) {
    const ZwSolution s = solve_zw_joint(a, b, c);
    return py::make_tuple(s.z_pi, s.w);
  });

  m.def(
      "extract_factors",
      [](const Matrix& pi, int rank) {
        const FactorDecomposition d = extract_factors(pi, rank);
        return py::make_tuple(d.loadings, d.factors, d.singular_values);
      },
      py::arg("pi"), py::arg("rank"), "Returns (loadings n x r, factors T x r, singular values).");
  m.def("variance_explained", &variance_explained, py::arg("singular_values"));
  m.def("procrustes_distance", &procrustes_distance, py::arg("a"), py::arg("b"));

  m.def(
      "simulate",
      [](const std::string& design, Eigen::Index n, Eigen::Index t_len, Eigen::Index p,
         std::uint64_t seed) {
        DesignSpec spec;
        spec.design = parse_design(design);
        spec.n = n;
        spec.t_len = t_len;
        spec.p = p;
        spec.seed = seed;
        const SimInstance inst = generate(spec);
        py::dict out;
        out["y"] = inst.data.y();
        out["design"] = inst.data.design();
        out["theta"] = inst.theta_true;
        out["pi"] = inst.pi_true;
        out["median_surface"] = inst.true_median_surface;
        return out;
      },
      py::arg("design") = "D1", py::arg("n") = 100, py::arg("T") = 100, py::arg("p") = 5,
      py::arg("seed") = 0);

  m.def("quantile_error", &quantile_error, py::arg("true_surface"), py::arg("est_surface"));
  m.def("theta_error_scaled", &theta_error_scaled, py::arg("theta_hat"), py::arg("theta_true"));

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli_main(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process; returns (exit code, stdout, stderr).");

  m.attr("RNG_ALGORITHM") = std::string(Rng::kAlgorithm);
}
