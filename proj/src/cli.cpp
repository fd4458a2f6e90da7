#include "lpqr/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lpqr/admm.hpp"
#include "lpqr/error.hpp"
#include "lpqr/factors.hpp"
#include "lpqr/io.hpp"
#include "lpqr/metrics.hpp"
#include "lpqr/prox.hpp"
#include "lpqr/select.hpp"
#include "lpqr/sim.hpp"

namespace lpqr {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) return args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) return args[k].substr(9);
  }
  return std::nullopt;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, "config " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

std::string tau_dir_name(double tau) {
  std::ostringstream s;
  s << "tau_" << tau;
  return s.str();
}

void write_run_config(const RunConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / "config.json");
  out << to_json(cfg).dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + (dir / "config.json").string());
}

ColumnScales scales_for(const PanelData& data, bool unit_weights) {
  if (data.p() == 0) return {Vector::Zero(0)};
  return unit_weights ? ColumnScales::unit(data.p()) : compute_column_scales(data);
}

std::optional<FactorDecomposition> decompose(const QuantileFit& fit, int requested_rank) {
  const int rank = requested_rank > 0 ? requested_rank : fit.rank_estimate;
  if (rank < 1) return std::nullopt;
  return extract_factors(fit.pi, rank);
}

void print_fit_line(std::ostream& out, const QuantileFit& f) {
  out << "tau=" << f.tau << " rank=" << f.rank_estimate << " sparsity=" << f.sparsity_estimate
      << " objective=" << format_double(f.objective) << " iterations=" << f.iterations
      << " converged=" << (f.converged ? "true" : "false") << '\n';
}

void run_fit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.input.empty()) throw UsageError("fit requires --input");
  const LabeledPanel panel = read_panel_csv(cfg.input);
  const ColumnScales scales = scales_for(panel.data, cfg.unit_weights);
  const fs::path root(cfg.output_dir);
  write_run_config(cfg, root);
  for (double tau : cfg.taus) {
    SolverConfig sc = cfg.solver;
    sc.tau = tau;
    const QuantileFit f = fit(panel.data, sc, scales);
    const auto dec = decompose(f, cfg.rank);
    const fs::path dir = cfg.taus.size() == 1 ? root : root / tau_dir_name(tau);
    write_fit(f, dec ? &*dec : nullptr, scales, sc, dir, {{"input", cfg.input}});
    print_fit_line(out, f);
  }
}

void run_tune(const RunConfig& cfg, std::ostream& out) {
  if (cfg.input.empty()) throw UsageError("tune requires --input");
  const LabeledPanel panel = read_panel_csv(cfg.input);
  const ColumnScales scales = scales_for(panel.data, cfg.unit_weights);
  const double c1 = cfg.c1 > 0.0 ? cfg.c1 : default_c1(panel.data);
  const fs::path root(cfg.output_dir);
  write_run_config(cfg, root);
  for (double tau : cfg.taus) {
    SolverConfig sc = cfg.solver;
    sc.tau = tau;
    const SelectionReport report = grid_search(panel.data, cfg.grid, sc, scales, c1);
    const fs::path dir = cfg.taus.size() == 1 ? root : root / tau_dir_name(tau);
    fs::create_directories(dir);
    write_selection_csv(dir / "selection.csv", report);
    sc.nu1 = report.best_nu1;
    sc.nu2 = report.best_nu2;
    const auto dec = decompose(report.best_fit, cfg.rank);
    write_fit(report.best_fit, dec ? &*dec : nullptr, scales, sc, dir,
              {{"input", cfg.input}, {"c1", c1}, {"selected_by", "bic"}});
    out << "best nu1=" << format_double(report.best_nu1)
        << " nu2=" << format_double(report.best_nu2) << ' ';
    print_fit_line(out, report.best_fit);
  }
}

void run_simulate(const RunConfig& cfg, std::ostream& out) {
  const SimInstance inst = generate(cfg.design);
  const auto paths = write_sim_instance(inst, cfg.design, cfg.output_dir);
  write_run_config(cfg, cfg.output_dir);
  out << "wrote " << paths.front().string() << '\n';
}

void run_factors(const RunConfig& cfg, std::ostream& out) {
  if (cfg.input.empty()) throw UsageError("factors requires --input (a pi.csv)");
  const fs::path input(cfg.input);
  const Matrix pi = read_matrix_csv(input);
  int rank = cfg.rank;
  if (rank <= 0) {
    const fs::path summary = input.parent_path() / "summary.json";
    std::ifstream in(summary);
    if (!in) throw UsageError("factors needs --rank or a summary.json next to the input");
    rank = json::parse(in).value("rank", 0);
  }
  const FactorDecomposition dec = extract_factors(pi, rank);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_matrix_csv(dir / "factors.csv", dec.factors);
  write_matrix_csv(dir / "loadings.csv", dec.loadings);

  const Vector spectrum = thin_svd(pi).s;
  const int nonzero = std::max(estimate_rank(spectrum), 1);
  const Vector share = variance_explained(spectrum);
  std::ofstream ve(dir / "variance_explained.csv");
  ve << "k,singular_value,percent\n";
  for (int k = 0; k < nonzero; ++k) {
    ve << (k + 1) << ',' << format_double(spectrum[k]) << ',' << format_double(share[k]) << '\n';
  }
  if (!ve) throw Error(ErrorKind::IoError, "cannot write variance_explained.csv");
  out << "rank=" << rank << " leading_share=" << share[0] << "%\n";
}

void run_bench(const RunConfig& cfg, bool with_bic, bool bic_only, std::ostream& out) {
  std::vector<Method> methods;
  for (const auto& m : cfg.methods) methods.push_back(parse_method(m));
  McOptions opts;
  opts.base = cfg.solver;
  opts.c1 = cfg.c1;
  opts.with_bic_rows = with_bic;
  const auto reports = run_monte_carlo(cfg.design, methods, cfg.grid, cfg.reps, !bic_only, opts);
  const fs::path dir(cfg.output_dir);
  write_run_config(cfg, dir);
  write_mc_csv(dir / "bench.csv", reports);
  for (const McReport& r : reports) {
    out << r.method << " theta_err_scaled=" << r.mean_theta_err_scaled
        << " quantile_err=" << r.mean_quantile_err << " reps=" << r.reps << '\n';
  }
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg;
    if (auto path = find_config_path(args)) cfg = load_config(*path);

    CLI::App app{"Latent panel quantile regression: l1 + nuclear-norm penalized ADMM"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON run configuration (flags override it)");

    std::string tau_list, loss_name, grid_nu1, grid_nu2, design_name_text, methods_text;
    std::optional<double> eta, pi_bound;
    bool with_bic = false, bic_only = false;

    auto add_solver = [&](CLI::App* sub) {
      sub->add_option("--tau", tau_list, "quantile level(s), comma separated");
      sub->add_option("--nu1", cfg.solver.nu1, "l1 penalty");
      sub->add_option("--nu2", cfg.solver.nu2, "nuclear-norm penalty");
      sub->add_option("--eta", eta, "ADMM penalty (default 1/(nT))");
      sub->add_option("--max-iter", cfg.solver.max_iter);
      sub->add_option("--tol-abs", cfg.solver.tol_abs);
      sub->add_option("--tol-rel", cfg.solver.tol_rel);
      sub->add_option("--loss", loss_name, "quantile | squared");
      sub->add_flag("--fix-pi-zero", cfg.solver.fix_pi_zero, "l1-only baseline (Pi = 0)");
      sub->add_option("--pi-inf-bound", pi_bound, "entrywise bound on Pi");
      sub->add_flag("--unit-weights", cfg.unit_weights, "unit l1 weights instead of column scales");
      sub->add_option("--rank", cfg.rank, "number of factors to export (default: fitted rank)");
      sub->add_option("--out", cfg.output_dir, "output directory");
    };
    auto add_grid = [&](CLI::App* sub) {
      sub->add_option("--grid-nu1", grid_nu1, "nu1 values, comma separated");
      sub->add_option("--grid-nu2", grid_nu2, "nu2 values, comma separated");
      sub->add_option("--c1", cfg.c1, "BIC sparsity weight (default log(nT)^2)");
    };
    auto add_design = [&](CLI::App* sub) {
      sub->add_option("--design", design_name_text, "D1 | D2 | D3 | D4");
      sub->add_option("--n", cfg.design.n);
      sub->add_option("--T", cfg.design.t_len);
      sub->add_option("--p", cfg.design.p);
      sub->add_option("--seed", cfg.design.seed);
    };

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit one model per tau");
    fit_cmd->add_option("--input", cfg.input, "panel CSV (unit,period,y,x1..xp)");
    add_solver(fit_cmd);

    CLI::App* tune_cmd = app.add_subcommand("tune", "BIC grid search over (nu1, nu2)");
    tune_cmd->add_option("--input", cfg.input, "panel CSV");
    add_solver(tune_cmd);
    add_grid(tune_cmd);

    CLI::App* sim_cmd = app.add_subcommand("simulate", "generate a simulation design");
    add_design(sim_cmd);
    sim_cmd->add_option("--out", cfg.output_dir);

    CLI::App* fac_cmd = app.add_subcommand("factors", "factors and loadings from a stored pi.csv");
    fac_cmd->add_option("--input", cfg.input, "pi.csv");
    fac_cmd->add_option("--rank", cfg.rank);
    fac_cmd->add_option("--out", cfg.output_dir);

    CLI::App* bench_cmd = app.add_subcommand("bench", "Monte Carlo comparison of methods");
    add_design(bench_cmd);
    add_solver(bench_cmd);
    add_grid(bench_cmd);
    bench_cmd->add_option("--reps", cfg.reps);
    bench_cmd->add_option("--methods", methods_text, "l1nnqr,l1qr,l1nnls");
    bench_cmd->add_flag("--with-bic", with_bic, "also report BIC-selected rows");
    bench_cmd->add_flag("--bic", bic_only, "report BIC-selected rows only");

    std::vector<const char*> argv{"lpqr"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      err << "error: Usage: " << e.what() << '\n';
      return 2;
    }

    if (!tau_list.empty()) cfg.taus = parse_double_list(tau_list);
    if (eta) cfg.solver.eta = eta;
    if (pi_bound) cfg.solver.pi_inf_bound = pi_bound;
    if (!loss_name.empty()) {
      if (loss_name == "quantile") cfg.solver.loss = LossKind::Quantile;
      else if (loss_name == "squared") cfg.solver.loss = LossKind::Squared;
      else throw UsageError("--loss must be quantile or squared");
    }
    if (!grid_nu1.empty()) cfg.grid.nu1_values = parse_double_list(grid_nu1);
    if (!grid_nu2.empty()) cfg.grid.nu2_values = parse_double_list(grid_nu2);
    if (!design_name_text.empty()) cfg.design.design = parse_design(design_name_text);
    if (!methods_text.empty()) cfg.methods = split_names(methods_text);
    if (cfg.taus.empty()) throw UsageError("--tau list is empty");
    for (double tau : cfg.taus) {
      SolverConfig probe = cfg.solver;
      probe.tau = tau;
      probe.validate();
    }

    const CLI::App* chosen = app.get_subcommands().front();
    cfg.command = chosen->get_name();
    if (cfg.command == "fit") run_fit(cfg, out);
    else if (cfg.command == "tune") run_tune(cfg, out);
    else if (cfg.command == "simulate") run_simulate(cfg, out);
    else if (cfg.command == "factors") run_factors(cfg, out);
    else if (cfg.command == "bench") run_bench(cfg, with_bic, bic_only, out);
    return 0;
  } catch (const UsageError& e) {
    err << "error: Usage: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << error_kind_name(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidArgument ? 2 : 3;
  } catch (const fs::filesystem_error& e) {
    err << "error: IoError: " << e.what() << '\n';
    return 3;
  } catch (const json::exception& e) {
    err << "error: ParseError: " << e.what() << '\n';
    return 3;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace lpqr
