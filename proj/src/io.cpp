#include "lpqr/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "lpqr/error.hpp"

namespace lpqr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view text, const std::string& where) {
  double value = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::ParseError, where + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

json vector_json(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (std::string_view item : split(text)) {
    if (!item.empty()) out.push_back(parse_double(item, "list"));
  }
  return out;
}

LabeledPanel read_panel_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header_line = line;
      break;
    }
  }
  if (header_line.empty()) throw Error(ErrorKind::EmptyFile, path.string() + " is empty");
  header = split(header_line);
  if (header.size() < 3 || header[0] != "unit" || header[1] != "period" || header[2] != "y") {
    throw Error(ErrorKind::ParseError,
                path.string() + ": header must start with unit,period,y");
  }
  const std::size_t p = header.size() - 3;

  std::unordered_map<std::string, Eigen::Index> unit_index, period_index;
  LabeledPanel out;
  struct Row {
    Eigen::Index unit, period;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::ParseError, where + ": expected " + std::to_string(header.size()) +
                                             " fields, got " + std::to_string(fields.size()));
    }
    Row row;
    auto lookup = [](auto& index, auto& labels, std::string_view key) {
      auto [it, inserted] = index.try_emplace(std::string(key), static_cast<Eigen::Index>(labels.size()));
      if (inserted) labels.emplace_back(key);
      return it->second;
    };
    row.unit = lookup(unit_index, out.units, fields[0]);
    row.period = lookup(period_index, out.periods, fields[1]);
    row.values.reserve(p + 1);
    for (std::size_t k = 2; k < fields.size(); ++k) {
      row.values.push_back(parse_double(fields[k], where));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyFile, path.string() + " has no data rows");

  const Eigen::Index n = static_cast<Eigen::Index>(out.units.size());
  const Eigen::Index t_len = static_cast<Eigen::Index>(out.periods.size());
  Matrix y(n, t_len);
  Matrix design(n * t_len, static_cast<Eigen::Index>(p));
  std::vector<char> seen(static_cast<std::size_t>(n * t_len), 0);
  for (const Row& row : rows) {
    const Eigen::Index cell = row.unit + n * row.period;
    if (seen[static_cast<std::size_t>(cell)]) {
      throw Error(ErrorKind::DuplicateCell,
                  "duplicate cell (" + out.units[static_cast<std::size_t>(row.unit)] + ", " +
                      out.periods[static_cast<std::size_t>(row.period)] + ")");
    }
    seen[static_cast<std::size_t>(cell)] = 1;
    y(row.unit, row.period) = row.values[0];
    for (std::size_t j = 0; j < p; ++j) {
      design(cell, static_cast<Eigen::Index>(j)) = row.values[j + 1];
    }
  }
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!seen[static_cast<std::size_t>(i + n * t)]) {
        throw Error(ErrorKind::UnbalancedPanel,
                    "missing cell (" + out.units[static_cast<std::size_t>(i)] + ", " +
                        out.periods[static_cast<std::size_t>(t)] + ")");
      }
    }
  }
  out.data = PanelData(std::move(y), std::move(design));
  return out;
}

void write_panel_csv(const fs::path& path, const PanelData& data,
                     const std::vector<std::string>& units,
                     const std::vector<std::string>& periods) {
  std::ofstream out = open_out(path);
  out << "unit,period,y";
  for (Eigen::Index j = 0; j < data.p(); ++j) out << ",x" << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index t = 0; t < data.t_len(); ++t) {
      if (units.empty()) out << 'u' << (i + 1); else out << units[static_cast<std::size_t>(i)];
      out << ',';
      if (periods.empty()) out << 't' << (t + 1); else out << periods[static_cast<std::size_t>(t)];
      out << ',' << format_double(data.y()(i, t));
      for (Eigen::Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.x(i, t, j));
      out << '\n';
    }
  }
  close_checked(out, path);
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  close_checked(out, path);
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (std::string_view f : split(line)) {
      row.push_back(parse_double(f, path.string() + ":" + std::to_string(line_no)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) +
                                             ": ragged matrix row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyFile, path.string() + " is empty");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

json solver_to_json(const SolverConfig& c) {
  json j;
  j["tau"] = c.tau;
  j["nu1"] = c.nu1;
  j["nu2"] = c.nu2;
  j["eta"] = c.eta ? json(*c.eta) : json(nullptr);
  j["max_iter"] = c.max_iter;
  j["tol_abs"] = c.tol_abs;
  j["tol_rel"] = c.tol_rel;
  j["loss"] = c.loss == LossKind::Quantile ? "quantile" : "squared";
  j["fix_pi_zero"] = c.fix_pi_zero;
  j["pi_inf_bound"] = c.pi_inf_bound ? json(*c.pi_inf_bound) : json(nullptr);
  return j;
}

namespace {

SolverConfig solver_from_json(const json& j) {
  SolverConfig c;
  c.tau = j.value("tau", c.tau);
  c.nu1 = j.value("nu1", c.nu1);
  c.nu2 = j.value("nu2", c.nu2);
  if (j.contains("eta") && !j["eta"].is_null()) c.eta = j["eta"].get<double>();
  c.max_iter = j.value("max_iter", c.max_iter);
  c.tol_abs = j.value("tol_abs", c.tol_abs);
  c.tol_rel = j.value("tol_rel", c.tol_rel);
  const std::string loss = j.value("loss", std::string("quantile"));
  if (loss == "quantile") {
    c.loss = LossKind::Quantile;
  } else if (loss == "squared") {
    c.loss = LossKind::Squared;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown loss '" + loss + "'");
  }
  c.fix_pi_zero = j.value("fix_pi_zero", c.fix_pi_zero);
  if (j.contains("pi_inf_bound") && !j["pi_inf_bound"].is_null()) {
    c.pi_inf_bound = j["pi_inf_bound"].get<double>();
  }
  return c;
}

}  // namespace

json to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["input"] = cfg.input;
  j["output_dir"] = cfg.output_dir;
  j["taus"] = cfg.taus;
  j["solver"] = solver_to_json(cfg.solver);
  j["grid"] = {{"nu1", cfg.grid.nu1_values}, {"nu2", cfg.grid.nu2_values}};
  j["c1"] = cfg.c1;
  j["unit_weights"] = cfg.unit_weights;
  json d;
  d["design"] = std::string(design_name(cfg.design.design));
  d["n"] = cfg.design.n;
  d["T"] = cfg.design.t_len;
  d["p"] = cfg.design.p;
  d["seed"] = cfg.design.seed;
  d["scale_coef_override"] =
      cfg.design.scale_coef_override ? vector_json(*cfg.design.scale_coef_override) : json(nullptr);
  j["design"] = d;
  j["reps"] = cfg.reps;
  j["methods"] = cfg.methods;
  j["rank"] = cfg.rank;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  try {
    cfg.command = j.value("command", cfg.command);
    cfg.input = j.value("input", cfg.input);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    if (j.contains("taus")) cfg.taus = j["taus"].get<std::vector<double>>();
    if (j.contains("solver")) cfg.solver = solver_from_json(j["solver"]);
    if (j.contains("grid")) {
      cfg.grid.nu1_values = j["grid"].value("nu1", cfg.grid.nu1_values);
      cfg.grid.nu2_values = j["grid"].value("nu2", cfg.grid.nu2_values);
    }
    cfg.c1 = j.value("c1", cfg.c1);
    cfg.unit_weights = j.value("unit_weights", cfg.unit_weights);
    if (j.contains("design")) {
      const json& d = j["design"];
      cfg.design.design = parse_design(d.value("design", std::string("D1")));
      cfg.design.n = d.value("n", cfg.design.n);
      cfg.design.t_len = d.value("T", cfg.design.t_len);
      cfg.design.p = d.value("p", cfg.design.p);
      cfg.design.seed = d.value("seed", cfg.design.seed);
      if (d.contains("scale_coef_override") && !d["scale_coef_override"].is_null()) {
        const auto v = d["scale_coef_override"].get<std::vector<double>>();
        cfg.design.scale_coef_override = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
    }
    cfg.reps = j.value("reps", cfg.reps);
    cfg.methods = j.value("methods", cfg.methods);
    cfg.rank = j.value("rank", cfg.rank);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  return cfg;
}

std::vector<fs::path> write_fit(const QuantileFit& fit, const FactorDecomposition* decomposition,
                                const ColumnScales& scales, const SolverConfig& config,
                                const fs::path& dir, const json& extra) {
  ensure_dir(dir);
  std::vector<fs::path> paths;

  const fs::path theta_path = dir / "theta.csv";
  {
    std::ofstream out = open_out(theta_path);
    out << "j,value,scale\n";
    for (Eigen::Index j = 0; j < fit.theta.size(); ++j) {
      const double scale = j < scales.sigma_hat.size() ? scales.sigma_hat[j] : 1.0;
      out << (j + 1) << ',' << format_double(fit.theta[j]) << ',' << format_double(scale) << '\n';
    }
    close_checked(out, theta_path);
  }
  paths.push_back(theta_path);

  paths.push_back(dir / "pi.csv");
  write_matrix_csv(paths.back(), fit.pi);
  if (decomposition) {
    paths.push_back(dir / "factors.csv");
    write_matrix_csv(paths.back(), decomposition->factors);
    paths.push_back(dir / "loadings.csv");
    write_matrix_csv(paths.back(), decomposition->loadings);
  }

  json s;
  s["tau"] = fit.tau;
  s["nu1"] = config.nu1;
  s["nu2"] = config.nu2;
  s["rank"] = fit.rank_estimate;
  s["sparsity"] = fit.sparsity_estimate;
  s["objective"] = fit.objective;
  s["iterations"] = fit.iterations;
  s["converged"] = fit.converged;
  s["primal_residual"] = fit.primal_residual;
  s["dual_residual"] = fit.dual_residual;
  s["singular_values"] = vector_json(fit.singular_values.head(std::max(fit.rank_estimate, 0)));
  s["n"] = fit.pi.rows();
  s["T"] = fit.pi.cols();
  s["p"] = fit.theta.size();
  s["config"] = solver_to_json(config);
  s["rng_algorithm"] = std::string(Rng::kAlgorithm);
  for (auto it = extra.begin(); it != extra.end(); ++it) s[it.key()] = it.value();

  const fs::path summary_path = dir / "summary.json";
  std::ofstream out = open_out(summary_path);
  out << s.dump(2) << '\n';
  close_checked(out, summary_path);
  paths.push_back(summary_path);
  return paths;
}

Vector read_theta_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::vector<double> values;
  bool header = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto fields = split(line);
    if (fields.size() < 2) throw Error(ErrorKind::ParseError, path.string() + ": bad theta row");
    values.push_back(parse_double(fields[1], path.string()));
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_selection_csv(const fs::path& path, const SelectionReport& report) {
  std::ofstream out = open_out(path);
  out << "nu1,nu2,bic,sparsity,rank,objective,converged,best\n";
  for (const SelectionRow& r : report.table) {
    const bool best = r.nu1 == report.best_nu1 && r.nu2 == report.best_nu2;
    out << format_double(r.nu1) << ',' << format_double(r.nu2) << ',' << format_double(r.bic)
        << ',' << r.sparsity << ',' << r.rank << ',' << format_double(r.objective) << ','
        << (r.converged ? 1 : 0) << ',' << (best ? 1 : 0) << '\n';
  }
  close_checked(out, path);
}

std::vector<fs::path> write_sim_instance(const SimInstance& inst, const DesignSpec& spec,
                                         const fs::path& dir) {
  ensure_dir(dir);
  std::vector<fs::path> paths{dir / "panel.csv", dir / "pi_true.csv", dir / "median_surface.csv",
                              dir / "truth.json"};
  write_panel_csv(paths[0], inst.data);
  write_matrix_csv(paths[1], inst.pi_true);
  write_matrix_csv(paths[2], inst.true_median_surface);
  json t;
  t["design"] = std::string(design_name(spec.design));
  t["n"] = spec.n;
  t["T"] = spec.t_len;
  t["p"] = spec.p;
  t["seed"] = spec.seed;
  t["rng_algorithm"] = std::string(Rng::kAlgorithm);
  t["theta"] = vector_json(inst.theta_true);
  t["scale_coef"] = inst.scale_coef ? vector_json(*inst.scale_coef) : json(nullptr);
  std::ofstream out = open_out(paths[3]);
  out << t.dump(2) << '\n';
  close_checked(out, paths[3]);
  return paths;
}

void write_mc_csv(const fs::path& path, const std::vector<McReport>& reports) {
  std::ofstream out = open_out(path);
  out << "method,design,n,p,T,reps,failed_reps,theta_err_scaled,quantile_err,"
         "grid_oracle_theta_err_scaled,grid_oracle_quantile_err\n";
  for (const McReport& r : reports) {
    out << r.method << ',' << design_name(r.design) << ',' << r.n << ',' << r.p << ','
        << r.t_len << ',' << r.reps << ',' << r.failed_reps << ','
        << format_double(r.mean_theta_err_scaled) << ',' << format_double(r.mean_quantile_err)
        << ',' << format_double(r.grid_oracle_theta_err) << ','
        << format_double(r.grid_oracle_quantile_err) << '\n';
  }
  close_checked(out, path);
}

}  // namespace lpqr
