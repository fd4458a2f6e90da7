#include <doctest.h>

#include <cmath>
#include <limits>

#include "lpqr/admm.hpp"
#include "lpqr/error.hpp"
#include "lpqr/select.hpp"
#include "lpqr/sim.hpp"
#include "oracles.hpp"

using namespace lpqr;

namespace {

SimInstance small_instance(std::uint64_t seed) {
  DesignSpec spec;
  spec.n = 15;
  spec.t_len = 12;
  spec.p = 3;
  spec.seed = seed;
  return generate(spec);
}

TuningGrid small_grid() {
  TuningGrid g;
  g.nu1_values = {1e-3, 1e-4};
  g.nu2_values = {1e-5, 1e-2, 1e-3};  // deliberately unsorted
  return g;
}

}  // namespace

TEST_SUITE("select") {

TEST_CASE("sparsity and rank counts use a relative zero floor") {
  Vector theta(5);
  theta << 2.0, 1e-9, -3.0, 0.0, 1e-7;
  CHECK(estimate_sparsity(theta) == 3);
  Vector small(3);
  small << 1e-9, 5e-9, 0.0;  // floor is 1e-8 * max(1, max|theta|)
  CHECK(estimate_sparsity(small) == 0);

  Vector s(4);
  s << 50.0, 2.0, 4e-7, 1e-8;
  CHECK(estimate_rank(s) == 2);
  CHECK(estimate_rank(Vector::Zero(3)) == 0);
}

TEST_CASE("default grid") {
  const TuningGrid g = TuningGrid::defaults();
  REQUIRE(g.nu1_values.size() == 9);
  REQUIRE(g.nu2_values.size() == 7);
  CHECK(g.nu1_values.front() == doctest::Approx(1e-4));
  CHECK(g.nu1_values[1] == doctest::Approx(std::pow(10.0, -4.5)));
  CHECK(g.nu1_values.back() == doctest::Approx(1e-8));
  CHECK(g.nu2_values.front() == doctest::Approx(1e-3));
  CHECK(g.nu2_values.back() == doctest::Approx(1e-9));

  const auto r = TuningGrid::log10_range(-4.5, -6.5, 0.5);
  REQUIRE(r.size() == 5);
  CHECK(r[4] == doctest::Approx(std::pow(10.0, -6.5)));
}

TEST_CASE("normalize sorts descending and rejects bad grids") {
  TuningGrid g = small_grid();
  g.normalize();
  CHECK(g.nu2_values == std::vector<double>{1e-2, 1e-3, 1e-5});
  TuningGrid empty;
  empty.nu1_values = {1e-3};
  CHECK_THROWS_AS(empty.normalize(), Error);
  TuningGrid negative = small_grid();
  negative.nu1_values.push_back(-1.0);
  CHECK_THROWS_AS(negative.normalize(), Error);
}

TEST_CASE("bic score by hand") {
  const SimInstance inst = small_instance(4);
  QuantileFit f;
  f.tau = 0.5;
  f.theta = inst.theta_true;
  f.pi = inst.pi_true;
  f.sparsity_estimate = 3;
  f.rank_estimate = 1;
  const Matrix r = inst.data.y() - inst.data.linear_part(f.theta) - f.pi;
  double fit_term = 0.0;
  for (Eigen::Index k = 0; k < r.size(); ++k) fit_term += oracle::pinball(r.data()[k], 0.5);
  const double nt = 180.0;
  const double c1 = std::log(nt) * std::log(nt);
  CHECK(default_c1(inst.data) == doctest::Approx(c1));
  const double expect = fit_term + std::log(nt) / 2.0 * (c1 * 3 + (1 + 15 + 12) * 1);
  CHECK(bic_score(f, inst.data, c1) == doctest::Approx(expect));
}

TEST_CASE("grid search table, order and argmin") {
  const SimInstance inst = small_instance(5);
  const ColumnScales scales = compute_column_scales(inst.data);
  std::vector<std::pair<double, double>> order;
  const SelectionReport rep = grid_search(
      inst.data, small_grid(), SolverConfig{}, scales, default_c1(inst.data),
      [&](const SelectionRow& row, const QuantileFit&) { order.emplace_back(row.nu1, row.nu2); });

  REQUIRE(rep.table.size() == 6);
  const std::vector<std::pair<double, double>> expect_order{
      {1e-3, 1e-2}, {1e-3, 1e-3}, {1e-3, 1e-5}, {1e-4, 1e-2}, {1e-4, 1e-3}, {1e-4, 1e-5}};
  CHECK(order == expect_order);

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < rep.table.size(); ++k) {
    CHECK(rep.table[k].nu1 == expect_order[k].first);
    CHECK(rep.table[k].nu2 == expect_order[k].second);
    if (rep.table[k].converged && rep.table[k].bic < best) {
      best = rep.table[k].bic;
      best_k = k;
    }
  }
  CHECK(rep.best_nu1 == rep.table[best_k].nu1);
  CHECK(rep.best_nu2 == rep.table[best_k].nu2);
  CHECK(bic_score(rep.best_fit, inst.data, default_c1(inst.data)) == doctest::Approx(best));
  CHECK(rep.best_fit.converged);
}

TEST_CASE("warm-started grid fits agree with cold fits") {
  const SimInstance inst = small_instance(6);
  const ColumnScales scales = compute_column_scales(inst.data);
  SolverConfig cfg;
  cfg.tol_abs = 1e-9;
  cfg.tol_rel = 1e-8;
  cfg.max_iter = 50000;
  std::vector<double> warm_objectives;
  const SelectionReport rep = grid_search(
      inst.data, small_grid(), cfg, scales, 0.0,
      [&](const SelectionRow&, const QuantileFit& f) { warm_objectives.push_back(f.objective); });
  for (std::size_t k = 0; k < rep.table.size(); ++k) {
    SolverConfig c = cfg;
    c.nu1 = rep.table[k].nu1;
    c.nu2 = rep.table[k].nu2;
    const QuantileFit cold = fit(inst.data, c, scales);
    CHECK(warm_objectives[k] == doctest::Approx(cold.objective).epsilon(1e-5));
  }
}

TEST_CASE("ties go to the first (largest) penalties") {
  // With c1 huge and penalties that zero everything, every row has the same BIC.
  const SimInstance inst = small_instance(7);
  TuningGrid g;
  g.nu1_values = {10.0, 20.0};
  g.nu2_values = {10.0, 20.0};
  const SelectionReport rep =
      grid_search(inst.data, g, SolverConfig{}, compute_column_scales(inst.data), 1.0);
  for (const auto& row : rep.table) CHECK(row.bic == rep.table.front().bic);
  CHECK(rep.best_nu1 == 20.0);
  CHECK(rep.best_nu2 == 20.0);
}

TEST_CASE("all fits failing raises AllFitsFailed") {
  const SimInstance inst = small_instance(8);
  SolverConfig cfg;
  cfg.max_iter = 1;
  try {
    grid_search(inst.data, small_grid(), cfg, compute_column_scales(inst.data), 0.0);
    FAIL("expected AllFitsFailed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllFitsFailed);
  }
}

TEST_CASE("worked examples") {
  CHECK(estimate_sparsity(Vector::Zero(3)) == 0);
  Vector a(3);
  a << 1.0, 0.0, -0.5;
  CHECK(estimate_sparsity(a) == 2);
  Vector b(2);
  b << 1.0, 1e-12;
  CHECK(estimate_sparsity(b) == 1);
  Vector s(3);
  s << 3.0, 0.5, 0.0;
  CHECK(estimate_rank(s) == 2);

  // n = T = 10, zero residuals
  const PanelData d(Matrix::Zero(10, 10), Matrix::Ones(100, 2));
  QuantileFit f;
  f.theta = Vector::Zero(2);
  f.pi = Matrix::Zero(10, 10);
  CHECK(bic_score(f, d, default_c1(d)) == 0.0);
  f.sparsity_estimate = 2;
  f.rank_estimate = 1;
  const double one = bic_score(f, d, default_c1(d));
  CHECK(one == doctest::Approx(146.02).epsilon(1e-4));
  f.rank_estimate = 2;
  CHECK(bic_score(f, d, default_c1(d)) - one == doctest::Approx(std::log(100.0) / 2.0 * 21.0));
}

TEST_CASE("one-point grid") {
  const SimInstance inst = small_instance(9);
  TuningGrid g;
  g.nu1_values = {1e-4};
  g.nu2_values = {1e-3};
  const SelectionReport rep =
      grid_search(inst.data, g, SolverConfig{}, compute_column_scales(inst.data), 0.0);
  CHECK(rep.table.size() == 1);
  CHECK(rep.best_nu1 == 1e-4);
  CHECK(rep.best_nu2 == 1e-3);
}

}  // TEST_SUITE
