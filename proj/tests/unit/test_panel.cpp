#include <doctest.h>

#include <cmath>
#include <limits>

#include "lpqr/error.hpp"
#include "lpqr/panel.hpp"
#include "oracles.hpp"

using namespace lpqr;

namespace {

template <class F>
ErrorKind kind_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected lpqr::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("panel") {

TEST_CASE("design rows follow the column-major (i + n*t) layout") {
  Matrix y = Matrix::Zero(2, 3);
  Matrix x0(2, 3), x1(2, 3);
  x0 << 1, 2, 3, 4, 5, 6;
  x1 << -1, -2, -3, -4, -5, -6;
  const PanelData d = PanelData::from_slices(y, {x0, x1});
  CHECK(d.n() == 2);
  CHECK(d.t_len() == 3);
  CHECK(d.p() == 2);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index t = 0; t < 3; ++t) {
      CHECK(d.x(i, t, 0) == x0(i, t));
      CHECK(d.x(i, t, 1) == x1(i, t));
    }
  CHECK(d.slice(1) == x1);

  Vector theta(2);
  theta << 2.0, 0.5;
  const Matrix expect = 2.0 * x0 + 0.5 * x1;
  CHECK((d.linear_part(theta) - expect).norm() == doctest::Approx(0.0));
}

TEST_CASE("constructor rejects bad input") {
  CHECK(kind_of([] { PanelData(Matrix::Zero(0, 3), Matrix::Zero(0, 1)); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { PanelData(Matrix::Zero(2, 3), Matrix::Zero(5, 1)); }) ==
        ErrorKind::DimensionMismatch);
  Matrix y = Matrix::Zero(2, 2);
  y(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(kind_of([&] { PanelData(y, Matrix::Ones(4, 1)); }) == ErrorKind::NonFiniteInput);
  CHECK(kind_of([] {
          PanelData::from_slices(Matrix::Zero(2, 2), {Matrix::Zero(2, 3)});
        }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("column scales are root mean squares and reject zero columns") {
  std::mt19937_64 gen(3);
  const Matrix design = oracle::random_matrix(12, 3, gen);
  const PanelData d(oracle::random_matrix(3, 4, gen), design);
  const ColumnScales s = compute_column_scales(d);
  for (Eigen::Index j = 0; j < 3; ++j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < 12; ++k) acc += design(k, j) * design(k, j);
    CHECK(s.sigma_hat[j] == doctest::Approx(std::sqrt(acc / 12.0)));
  }

  Matrix degenerate = design;
  degenerate.col(1).setZero();
  const PanelData bad(oracle::random_matrix(3, 4, gen), degenerate);
  CHECK(kind_of([&] { compute_column_scales(bad); }) == ErrorKind::DegenerateColumn);
}

TEST_CASE("pinball loss identities") {
  std::mt19937_64 gen(11);
  for (int k = 0; k < 500; ++k) {
    const double u = oracle::uniform(gen, -5.0, 5.0);
    const double tau = oracle::uniform(gen, 0.01, 0.99);
    const double plus = std::max(u, 0.0), minus = std::max(-u, 0.0);
    CHECK(pinball_loss(u, tau) == doctest::Approx(tau * plus + (1.0 - tau) * minus));
    CHECK(pinball_loss(u, tau) == doctest::Approx(pinball_loss(-u, 1.0 - tau)));
    CHECK(pinball_loss(u, tau) >= 0.0);
    // positive homogeneity
    CHECK(pinball_loss(3.0 * u, tau) == doctest::Approx(3.0 * pinball_loss(u, tau)));
  }
  CHECK(pinball_loss(0.0, 0.3) == 0.0);
}

TEST_CASE("objective pieces agree with direct sums") {
  std::mt19937_64 gen(5);
  const PanelData d(oracle::random_matrix(4, 5, gen), oracle::random_matrix(20, 2, gen));
  const Vector theta = oracle::random_matrix(2, 1, gen);
  const Matrix pi = oracle::random_matrix(4, 5, gen);
  const Matrix r = d.y() - d.linear_part(theta) - pi;
  double pin = 0.0, sq = 0.0;
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    pin += oracle::pinball(r.data()[k], 0.3);
    sq += r.data()[k] * r.data()[k];
  }
  CHECK(loss_sum(d, theta, pi, 0.3) == doctest::Approx(pin));
  CHECK(loss_sum(d, theta, pi, 0.3, LossKind::Squared) == doctest::Approx(sq));
  CHECK(nuclear_norm(pi) == doctest::Approx(oracle::nuclear_norm(pi)));

  SolverConfig cfg;
  cfg.tau = 0.3;
  cfg.nu1 = 0.2;
  cfg.nu2 = 0.05;
  const ColumnScales scales = compute_column_scales(d);
  const double expect = pin / 20.0 + 0.2 * scales.sigma_hat.cwiseProduct(theta.cwiseAbs()).sum() +
                        0.05 * oracle::nuclear_norm(pi);
  CHECK(penalized_objective(d, theta, pi, cfg, scales) == doctest::Approx(expect));
}

TEST_CASE("solver config validation") {
  SolverConfig ok;
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.resolved_eta(200) == doctest::Approx(1.0 / 200.0));
  ok.eta = 0.7;
  CHECK(ok.resolved_eta(200) == 0.7);

  auto expect_invalid = [](SolverConfig c) {
    CHECK(kind_of([&] { c.validate(); }) == ErrorKind::InvalidArgument);
  };
  SolverConfig c;
  c.tau = 0.0;
  expect_invalid(c);
  c = {};
  c.tau = 1.0;
  expect_invalid(c);
  c = {};
  c.nu1 = -1e-3;
  expect_invalid(c);
  c = {};
  c.eta = 0.0;
  expect_invalid(c);
  c = {};
  c.max_iter = 0;
  expect_invalid(c);
  c = {};
  c.tol_rel = 0.0;
  expect_invalid(c);
  c = {};
  c.pi_inf_bound = -2.0;
  expect_invalid(c);
}

TEST_CASE("worked examples") {
  auto scale_of = [](std::initializer_list<double> entries) {
    Matrix x(2, 2);
    auto it = entries.begin();
    for (Eigen::Index t = 0; t < 2; ++t)
      for (Eigen::Index i = 0; i < 2; ++i) x(i, t) = *it++;
    return compute_column_scales(PanelData::from_slices(Matrix::Zero(2, 2), {x})).sigma_hat[0];
  };
  CHECK(scale_of({1, 1, 1, 1}) == doctest::Approx(1.0));
  CHECK(scale_of({1, -1, 1, -1}) == doctest::Approx(1.0));
  CHECK(scale_of({1, 2, 3, 4}) == doctest::Approx(std::sqrt(30.0 / 4.0)).epsilon(1e-12));

  CHECK(pinball_loss(0.0, 0.5) == 0.0);
  CHECK(pinball_loss(2.0, 0.3) == doctest::Approx(0.6));
  CHECK(pinball_loss(-2.0, 0.3) == doctest::Approx(1.4));

  const PanelData zero(Matrix::Zero(2, 2), Matrix::Ones(4, 1));
  SolverConfig cfg;
  cfg.nu1 = 0.3;
  cfg.nu2 = 1.0;
  const ColumnScales s = compute_column_scales(zero);
  CHECK(penalized_objective(zero, Vector::Zero(1), Matrix::Zero(2, 2), cfg, s) == 0.0);
  cfg.nu1 = 0.0;
  CHECK(penalized_objective(zero, Vector::Zero(1), Matrix::Identity(2, 2), cfg, s) ==
        doctest::Approx(2.25));
}

}  // TEST_SUITE
