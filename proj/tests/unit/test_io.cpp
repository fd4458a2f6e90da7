#include <doctest.h>

#include <fstream>
#include <sstream>

#include "lpqr/admm.hpp"
#include "lpqr/error.hpp"
#include "lpqr/io.hpp"
#include "oracles.hpp"

using namespace lpqr;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "io_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

ErrorKind read_kind(const fs::path& path) {
  try {
    read_panel_csv(path);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected lpqr::Error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("simulated panel survives a CSV round trip exactly") {
  const fs::path dir = scratch("roundtrip");
  DesignSpec spec;
  spec.design = Design::D4;
  spec.n = 9;
  spec.t_len = 7;
  spec.p = 3;
  spec.seed = 8;
  const SimInstance inst = generate(spec);
  write_panel_csv(dir / "panel.csv", inst.data);
  const LabeledPanel back = read_panel_csv(dir / "panel.csv");
  CHECK(back.data.y() == inst.data.y());
  CHECK(back.data.design() == inst.data.design());
  CHECK(back.units.front() == "u1");
  CHECK(back.periods.back() == "t7");
}

TEST_CASE("labels are indexed by first appearance, rows may come in any order") {
  const fs::path dir = scratch("labels");
  write_text(dir / "p.csv",
             "unit,period,y,x1\n"
             "b,2020-02,4,40\n"
             "a,2020-02,3,30\n"
             "b,2020-01,2,20\n"
             "a,2020-01,1,10\n");
  const LabeledPanel p = read_panel_csv(dir / "p.csv");
  CHECK(p.units == std::vector<std::string>{"b", "a"});
  CHECK(p.periods == std::vector<std::string>{"2020-02", "2020-01"});
  CHECK(p.data.y()(0, 0) == 4.0);
  CHECK(p.data.y()(1, 1) == 1.0);
  CHECK(p.data.x(1, 0, 0) == 30.0);
}

TEST_CASE("panel reader errors") {
  const fs::path dir = scratch("errors");
  write_text(dir / "empty.csv", "");
  CHECK(read_kind(dir / "empty.csv") == ErrorKind::EmptyFile);
  write_text(dir / "header_only.csv", "unit,period,y,x1\n");
  CHECK(read_kind(dir / "header_only.csv") == ErrorKind::EmptyFile);
  write_text(dir / "bad_number.csv", "unit,period,y,x1\na,1,1.5,abc\n");
  CHECK(read_kind(dir / "bad_number.csv") == ErrorKind::ParseError);
  write_text(dir / "short_row.csv", "unit,period,y,x1\na,1,1.5\n");
  CHECK(read_kind(dir / "short_row.csv") == ErrorKind::ParseError);
  write_text(dir / "bad_header.csv", "id,time,value\na,1,1\n");
  CHECK(read_kind(dir / "bad_header.csv") == ErrorKind::ParseError);
  write_text(dir / "dup.csv", "unit,period,y,x1\na,1,1,1\na,1,2,2\n");
  CHECK(read_kind(dir / "dup.csv") == ErrorKind::DuplicateCell);
  write_text(dir / "unbalanced.csv", "unit,period,y,x1\na,1,1,1\na,2,1,1\nb,1,1,1\n");
  CHECK(read_kind(dir / "unbalanced.csv") == ErrorKind::UnbalancedPanel);
  CHECK(read_kind(dir / "missing.csv") == ErrorKind::IoError);
}

TEST_CASE("matrix and list helpers") {
  const fs::path dir = scratch("matrix");
  std::mt19937_64 gen(9);
  const Matrix m = oracle::random_matrix(4, 6, gen, 1e3);
  write_matrix_csv(dir / "m.csv", m);
  CHECK(read_matrix_csv(dir / "m.csv") == m);
  CHECK(parse_double_list("0.1, 0.5,0.9") == std::vector<double>{0.1, 0.5, 0.9});
  CHECK_THROWS_AS(parse_double_list("0.1,x"), Error);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("fit outputs") {
  const fs::path dir = scratch("fit");
  DesignSpec spec;
  spec.n = 10;
  spec.t_len = 8;
  spec.p = 3;
  spec.seed = 21;
  const SimInstance inst = generate(spec);
  SolverConfig cfg;
  cfg.nu1 = 1e-4;
  cfg.nu2 = 1e-2;
  const ColumnScales scales = compute_column_scales(inst.data);
  const QuantileFit f = fit(inst.data, cfg, scales);
  const FactorDecomposition dec = extract_factors(f.pi, std::max(f.rank_estimate, 1));
  write_fit(f, &dec, scales, cfg, dir);

  const Vector theta = read_theta_csv(dir / "theta.csv");
  CHECK((theta - f.theta).cwiseAbs().maxCoeff() <= 1e-12);
  const Matrix pi = read_matrix_csv(dir / "pi.csv");
  CHECK(pi.rows() == 10);
  CHECK(pi.cols() == 8);
  CHECK(fs::exists(dir / "factors.csv"));
  CHECK(fs::exists(dir / "loadings.csv"));

  std::ifstream in(dir / "summary.json");
  const json s = json::parse(in);
  for (const char* key : {"tau", "nu1", "nu2", "rank", "sparsity", "objective", "iterations",
                          "converged", "primal_residual", "dual_residual", "config",
                          "rng_algorithm"}) {
    CHECK_MESSAGE(s.contains(key), key);
  }
  CHECK(s["rank"].get<int>() == f.rank_estimate);
  CHECK(s["config"]["nu2"].get<double>() == 1e-2);
}

TEST_CASE("run config JSON round trip") {
  RunConfig cfg;
  cfg.command = "tune";
  cfg.taus = {0.1, 0.9};
  cfg.solver.eta = 0.5;
  cfg.solver.loss = LossKind::Squared;
  cfg.solver.pi_inf_bound = 3.0;
  cfg.grid.nu1_values = {1e-3};
  cfg.design.design = Design::D3;
  cfg.design.seed = 12345678901234ull;
  cfg.methods = {"l1nnls"};
  const json j = to_json(cfg);
  const RunConfig back = run_config_from_json(j);
  CHECK(to_json(back).dump() == j.dump());
  CHECK(back.solver.eta.value() == 0.5);
  CHECK(back.design.seed == 12345678901234ull);
  CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"solver": {"loss": "hinge"}})")), Error);
}

TEST_CASE("worked examples") {
  const fs::path dir = scratch("examples");
  write_text(dir / "one.csv", "unit,period,y,x1\nu1,2000-01,0.5,1.0\n");
  const LabeledPanel one = read_panel_csv(dir / "one.csv");
  CHECK(one.data.n() == 1);
  CHECK(one.data.t_len() == 1);
  CHECK(one.data.y()(0, 0) == 0.5);
  write_text(dir / "dup.csv", "unit,period,y,x1\nu1,t1,1,1\nu1,t1,1,1\n");
  CHECK(read_kind(dir / "dup.csv") == ErrorKind::DuplicateCell);
  write_text(dir / "missing.csv",
             "unit,period,y,x1\na,1,1,1\na,2,1,1\na,3,1,1\nb,1,1,1\nb,2,1,1\n");
  CHECK(read_kind(dir / "missing.csv") == ErrorKind::UnbalancedPanel);
}

}  // TEST_SUITE
