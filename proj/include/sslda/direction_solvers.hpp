#pragma once

// Discriminant-direction solvers.
//
// solve_constrained_l1 handles the Dantzig-selector-type program
//
//     minimize |gamma|_1  subject to  |A gamma - b|_inf <= lambda,
//
// shared by SSLDA (A = p S_rho, b = difference of spatial medians) and
// LDA-CLIME (A = Sigma_rho, b = difference of sample means). lasso_direction
// backs the LS-LDA baseline.

#include "sslda/common.hpp"

#include <string_view>
#include <vector>

namespace sslda {

struct L1Program {
  Matrix a;  // square, p x p
  Vector b;  // length p
  double lambda = 0.0;
};

enum class SolveStatus { optimal, feasible_suboptimal, infeasible_numerically };

std::string_view to_string(SolveStatus status);

struct DirectionSolution {
  Vector gamma;
  double objective = 0.0;     // |gamma|_1
  double residual_inf = 0.0;  // |A gamma - b|_inf
  SolveStatus status = SolveStatus::optimal;
  int pivots = 0;
};

/// Solves the constrained l1 program as a linear program in split variables
/// gamma = g+ - g-, g+/- >= 0, with the 2p rows A gamma <= b + lambda and
/// -A gamma <= lambda - b.
///
/// The slack basis is dual feasible (all costs are non-negative), so the
/// solver runs a dense revised dual simplex from it with no phase one,
/// switching to Bland's smallest-index rule after a run of degenerate pivots.
/// A primal Bland cleanup restores optimality if refactorization finds a
/// slightly negative reduced cost. The basis inverse is refactorized
/// periodically and once more before the solution is read off.
///
/// The problem is rescaled by max|A_ij| internally, so (cA, cb, c lambda)
/// follows the same pivot path as (A, b, lambda).
///
/// Throws InputError for malformed programs and NumericalError when a basis
/// turns out singular on refactorization. An empty feasible set is reported
/// as SolveStatus::infeasible_numerically.
DirectionSolution solve_constrained_l1(const L1Program& program);

// `count` log-spaced values from 0.01 |b|_inf to |b|_inf, ascending.
std::vector<double> default_lambda_grid(const Eigen::Ref<const Vector>& b, int count);

struct LassoOptions {
  double tol = 1e-9;  // on the largest coordinate change in one sweep
  int max_sweeps = 20000;
};

struct LassoResult {
  Vector beta;
  int sweeps = 0;
  bool converged = false;
};

// Minimizes (1/(2n)) |y - X beta|_2^2 + lambda |beta|_1 by cyclic coordinate
// descent. X is used as given (callers center it).
LassoResult lasso_direction(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Vector>& y,
                            double lambda, const LassoOptions& options = {});

}  // namespace sslda
