#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "sslda/direction_solvers.hpp"
#include "sslda/random.hpp"

#include <cmath>
#include <random>

using namespace sslda;

namespace {

// Random integer matrix with entries in {-2..2}, redrawn until nonsingular.
Matrix integer_matrix(Index p, Rng& rng) {
  std::uniform_int_distribution<int> entry(-2, 2);
  while (true) {
    Matrix a(p, p);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < p; ++j) a(i, j) = entry(rng);
    if (std::abs(a.determinant()) > 0.5) return a;
  }
}

Vector uniform_vector(Index p, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(p);
  for (Index i = 0; i < p; ++i) v(i) = u(rng);
  return v;
}

Matrix spd_matrix(Index p, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(p + 5, p);
  for (Index i = 0; i < g.rows(); ++i)
    for (Index j = 0; j < p; ++j) g(i, j) = normal(rng);
  return g.transpose() * g / static_cast<double>(g.rows()) + 0.1 * Matrix::Identity(p, p);
}

double residual(const L1Program& prog, const Vector& gamma) {
  return (prog.a * gamma - prog.b).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_CASE("constrained l1: closed forms") {
  SUBCASE("one dimension soft-thresholds") {
    L1Program prog{Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 1.0), 0.4};
    const auto sol = solve_constrained_l1(prog);
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(sol.gamma(0) == doctest::Approx(0.3).epsilon(1e-12));
    prog.b(0) = -1.0;
    CHECK(solve_constrained_l1(prog).gamma(0) == doctest::Approx(-0.3).epsilon(1e-12));
  }
  SUBCASE("lambda at or above |b|_inf gives zero") {
    Rng rng = make_rng(1);
    for (int t = 0; t < 10; ++t) {
      const Index p = 1 + t % 5;
      L1Program prog{integer_matrix(p, rng), uniform_vector(p, rng, -3, 3), 0.0};
      prog.lambda = prog.b.lpNorm<Eigen::Infinity>() * (1.0 + 0.1 * t);
      const auto sol = solve_constrained_l1(prog);
      CHECK(sol.status == SolveStatus::optimal);
      CHECK(sol.gamma.isZero(0.0));
      CHECK(sol.objective == 0.0);
    }
  }
  SUBCASE("lambda zero solves the linear system") {
    Rng rng = make_rng(2);
    const Matrix a = spd_matrix(6, rng);
    const Vector b = uniform_vector(6, rng, -1, 1);
    const auto sol = solve_constrained_l1({a, b, 0.0});
    CHECK(sol.status == SolveStatus::optimal);
    CHECK((sol.gamma - a.lu().solve(b)).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("constrained l1 matches vertex enumeration on integer instances") {
  Rng rng = make_rng(3);
  for (int t = 0; t < 60; ++t) {
    const Index p = 1 + t % 4;
    L1Program prog{integer_matrix(p, rng), uniform_vector(p, rng, -2, 2), t % 3 == 0 ? 0.5 : 0.0};
    if (prog.lambda == 0.0) prog.lambda = uniform_vector(1, rng, 0.0, 1.2)(0) * prog.b.lpNorm<Eigen::Infinity>();
    const auto sol = solve_constrained_l1(prog);
    const double expected = oracle::l1_program_by_vertices(prog.a, prog.b, prog.lambda);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(std::abs(sol.objective - expected) <= 1e-6);
    CHECK(residual(prog, sol.gamma) <= prog.lambda + 1e-8);
    CHECK(sol.residual_inf == doctest::Approx(residual(prog, sol.gamma)).epsilon(1e-12));
    CHECK(sol.objective == doctest::Approx(sol.gamma.lpNorm<1>()).epsilon(1e-12));
  }
}

TEST_CASE("constrained l1: monotone in lambda, feasible along the default grid") {
  Rng rng = make_rng(4);
  for (int t = 0; t < 8; ++t) {
    const Index p = 5 + 5 * t;
    L1Program prog{spd_matrix(p, rng) * static_cast<double>(p), uniform_vector(p, rng, -1, 1), 0.0};
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : default_lambda_grid(prog.b, 12)) {
      prog.lambda = lambda;
      const auto sol = solve_constrained_l1(prog);
      REQUIRE(sol.status == SolveStatus::optimal);
      CHECK(sol.residual_inf <= lambda + 1e-8);
      CHECK(sol.objective <= previous + 1e-9);
      previous = sol.objective;
    }
  }
}

TEST_CASE("constrained l1: scaling covariance and determinism") {
  Rng rng = make_rng(5);
  for (int t = 0; t < 10; ++t) {
    const Index p = 3 + 3 * t;
    L1Program prog{spd_matrix(p, rng), uniform_vector(p, rng, -1, 1), 0.0};
    prog.lambda = 0.2 * prog.b.lpNorm<Eigen::Infinity>();
    const auto base = solve_constrained_l1(prog);
    const auto again = solve_constrained_l1(prog);
    CHECK(base.gamma == again.gamma);
    CHECK(base.pivots == again.pivots);

    for (double c : {4.0, 0.125, 3.7, 1e-3, 250.0}) {
      const auto scaled = solve_constrained_l1({c * prog.a, c * prog.b, c * prog.lambda});
      REQUIRE(scaled.status == SolveStatus::optimal);
      if (c == 4.0 || c == 0.125) {
        CHECK(scaled.gamma == base.gamma);
      } else {
        CHECK((scaled.gamma - base.gamma).lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + base.gamma.lpNorm<1>()));
      }
    }
  }
}

TEST_CASE("constrained l1: empty feasible set and malformed input") {
  Matrix a(2, 2);
  a << 1, 1, 1, 1;
  Vector b(2);
  b << 1, -1;
  const auto sol = solve_constrained_l1({a, b, 0.1});
  CHECK(sol.status == SolveStatus::infeasible_numerically);

  CHECK_THROWS_AS(solve_constrained_l1({Matrix::Identity(2, 3), Vector::Ones(2), 0.1}), InputError);
  CHECK_THROWS_AS(solve_constrained_l1({Matrix::Identity(2, 2), Vector::Ones(3), 0.1}), InputError);
  CHECK_THROWS_AS(solve_constrained_l1({Matrix::Identity(2, 2), Vector::Ones(2), -0.1}), InputError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(solve_constrained_l1({bad, Vector::Ones(2), 0.1}), InputError);
}

TEST_CASE("default_lambda_grid") {
  Vector b(3);
  b << 0.5, -1.0, 0.2;
  const auto g3 = default_lambda_grid(b, 3);
  REQUIRE(g3.size() == 3);
  CHECK(g3[0] == doctest::Approx(0.01));
  CHECK(g3[1] == doctest::Approx(0.1));
  CHECK(g3[2] == 1.0);
  const auto g2 = default_lambda_grid(2.0 * b, 2);
  CHECK(g2[0] == doctest::Approx(0.02));
  CHECK(g2[1] == 2.0);
  const auto g20 = default_lambda_grid(b, 20);
  for (std::size_t i = 1; i < g20.size(); ++i) {
    CHECK(g20[i] > g20[i - 1]);
    CHECK(g20[i] / g20[i - 1] == doctest::Approx(std::pow(100.0, 1.0 / 19.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(default_lambda_grid(Vector::Zero(3), 5), InputError);
  CHECK_THROWS_AS(default_lambda_grid(b, 1), InputError);
}

TEST_CASE("lasso: closed forms") {
  Rng rng = make_rng(6);
  std::normal_distribution<double> normal;
  const Index n = 40, p = 5;
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = normal(rng);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = normal(rng);

  SUBCASE("full shrinkage threshold") {
    const double threshold = (x.transpose() * y).lpNorm<Eigen::Infinity>() / static_cast<double>(n);
    const auto res = lasso_direction(x, y, threshold);
    CHECK(res.converged);
    CHECK(res.beta.isZero(0.0));
    CHECK_FALSE(lasso_direction(x, y, 0.9 * threshold).beta.isZero(0.0));
  }
  SUBCASE("orthonormal columns, lambda zero: least squares") {
    const Matrix q = Eigen::HouseholderQR<Matrix>(x).householderQ() * Matrix::Identity(n, p);
    const auto res = lasso_direction(q, y, 0.0);
    CHECK(res.converged);
    CHECK((res.beta - q.transpose() * y).lpNorm<Eigen::Infinity>() < 1e-9);
  }
  SUBCASE("orthogonal columns: soft-thresholded least squares") {
    const Matrix q = Eigen::HouseholderQR<Matrix>(x).householderQ() * Matrix::Identity(n, p) *
                     std::sqrt(static_cast<double>(n));
    const double lambda = 0.15;
    const Vector ols = q.transpose() * y / static_cast<double>(n);
    const auto res = lasso_direction(q, y, lambda);
    for (Index j = 0; j < p; ++j) {
      const double expected = std::copysign(std::max(0.0, std::abs(ols(j)) - lambda), ols(j));
      CHECK(res.beta(j) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("lasso matches brute force on correlated two-column designs") {
  Rng rng = make_rng(7);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 6; ++t) {
    const Index n = 30;
    Matrix x(n, 2);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
      const double z = normal(rng);
      x(i, 0) = z + 0.3 * normal(rng);
      x(i, 1) = z + 0.3 * normal(rng);
      y(i) = 0.8 * x(i, 0) - 0.2 * x(i, 1) + 0.5 * normal(rng);
    }
    const double lambda = 0.02 + 0.05 * t;
    const auto res = lasso_direction(x, y, lambda);
    const Vector expected = oracle::lasso_2d(x, y, lambda, 3.0);
    CHECK(res.converged);
    CHECK((res.beta - expected).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(oracle::lasso_objective(x, y, lambda, res.beta) <= oracle::lasso_objective(x, y, lambda, expected) + 1e-12);
  }
}

TEST_CASE("lasso: non-convergence is reported, bad input rejected") {
  Rng rng = make_rng(8);
  std::normal_distribution<double> normal;
  Matrix x(20, 6);
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 6; ++j) x(i, j) = normal(rng) + (j > 0 ? x(i, j - 1) : 0.0);
  Vector y = x.col(0) + x.col(5);
  LassoOptions opts;
  opts.max_sweeps = 1;
  const auto res = lasso_direction(x, y, 1e-4, opts);
  CHECK_FALSE(res.converged);
  CHECK(res.sweeps == 1);
  CHECK(res.beta.allFinite());

  CHECK_THROWS_AS(lasso_direction(x, Vector::Ones(3), 0.1), InputError);
  CHECK_THROWS_AS(lasso_direction(x, y, -1.0), InputError);
}
