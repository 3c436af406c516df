#include "sslda/direction_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sslda {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

LassoResult lasso_direction(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Vector>& y,
                            double lambda, const LassoOptions& options) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (n < 1 || p < 1) throw InputError("lasso_direction: empty design");
  if (y.size() != n) {
    throw InputError("lasso_direction: response has length " + std::to_string(y.size()) + ", design has " +
                     std::to_string(n) + " rows");
  }
  if (!x.allFinite() || !y.allFinite()) throw InputError("lasso_direction: non-finite input");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError("lasso_direction: lambda must be finite and non-negative");
  }

  // Covariance form: g = X'y/n - G beta is kept current, so a coordinate
  // update costs O(p) instead of O(n).
  const double inv_n = 1.0 / static_cast<double>(n);
  const Matrix gram = (x.transpose() * x) * inv_n;
  Vector g = (x.transpose() * y) * inv_n;

  LassoResult result;
  result.beta = Vector::Zero(p);

  const auto update = [&](Index j) {
    const double scale = gram(j, j);
    if (scale == 0.0) return 0.0;
    const double old = result.beta(j);
    const double updated = soft_threshold(g(j) + scale * old, lambda) / scale;
    const double change = updated - old;
    if (change != 0.0) {
      g.noalias() -= change * gram.col(j);
      result.beta(j) = updated;
    }
    return std::abs(change);
  };

  // Full sweeps alternate with sweeps over the current support until a full
  // sweep moves nothing by more than tol.
  std::vector<Index> active;
  while (result.sweeps < options.max_sweeps) {
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) max_change = std::max(max_change, update(j));
    ++result.sweeps;
    if (max_change < options.tol) {
      result.converged = true;
      break;
    }
    active.clear();
    for (Index j = 0; j < p; ++j) {
      if (result.beta(j) != 0.0) active.push_back(j);
    }
    while (result.sweeps < options.max_sweeps) {
      double inner = 0.0;
      for (Index j : active) inner = std::max(inner, update(j));
      ++result.sweeps;
      if (inner < options.tol) break;
    }
  }
  return result;
}

}  // namespace sslda
