#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lpqr/factors.hpp"
#include "lpqr/metrics.hpp"
#include "lpqr/panel.hpp"
#include "lpqr/select.hpp"
#include "lpqr/sim.hpp"

namespace lpqr {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Panel read from long-format CSV plus the original unit/period labels in
/// dense-index order.
struct LabeledPanel {
  PanelData data;
  std::vector<std::string> units;
  std::vector<std::string> periods;
};

/// Header "unit,period,y,x1,...,xp"; units and periods are indexed by first
/// appearance. Throws EmptyFile, ParseError, DuplicateCell, UnbalancedPanel, IoError.
LabeledPanel read_panel_csv(const fs::path& path);

/// Writes the long format read by read_panel_csv, units "u<i>" and periods "t<t>"
/// unless labels are given.
void write_panel_csv(const fs::path& path, const PanelData& data,
                     const std::vector<std::string>& units = {},
                     const std::vector<std::string>& periods = {});

/// Dense matrix, one row per line, no header, 17 significant digits.
void write_matrix_csv(const fs::path& path, const Matrix& m);
Matrix read_matrix_csv(const fs::path& path);

/// Formats with 17 significant digits ("%.17g").
std::string format_double(double v);

/// Parses "0.1,0.5" style lists.
std::vector<double> parse_double_list(const std::string& text);

/// All inputs of one CLI invocation. Serializes to canonical JSON (sorted keys).
struct RunConfig {
  std::string command;
  std::string input;
  std::string output_dir = "out";
  std::vector<double> taus{0.5};
  SolverConfig solver;
  TuningGrid grid = TuningGrid::defaults();
  double c1 = 0.0;  // <= 0 selects log(nT)^2
  bool unit_weights = false;
  DesignSpec design;
  int reps = 20;
  std::vector<std::string> methods{"l1nnqr", "l1qr"};
  int rank = 0;  // factors command; 0 means use the stored summary rank
};

json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const json& j);
json solver_to_json(const SolverConfig& cfg);

/// theta.csv, pi.csv, factors.csv, loadings.csv (when decomposition given) and
/// summary.json under dir. Returns written paths. Throws IoError.
std::vector<fs::path> write_fit(const QuantileFit& fit, const FactorDecomposition* decomposition,
                                const ColumnScales& scales, const SolverConfig& config,
                                const fs::path& dir, const json& extra = json::object());

/// theta.csv body: "j,value,scale".
Vector read_theta_csv(const fs::path& path);

void write_selection_csv(const fs::path& path, const SelectionReport& report);

/// Writes y/x panel CSV plus truth.json (theta, scale coefficients, rng id) and
/// pi_true.csv / median_surface.csv.
std::vector<fs::path> write_sim_instance(const SimInstance& inst, const DesignSpec& spec,
                                         const fs::path& dir);

/// Table-style rows: method,design,n,p,T,reps,failed,theta_err_scaled,quantile_err,...
void write_mc_csv(const fs::path& path, const std::vector<McReport>& reports);

}  // namespace lpqr
