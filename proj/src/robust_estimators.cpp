#include "sslda/robust_estimators.hpp"

#include <algorithm>
#include <cmath>

namespace sslda {

namespace {

constexpr double kCoincidence = 1e-12;

void require_square_same(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw InputError("pooled_sign_covariance: dimension mismatch (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}

struct DataPointTest {
  Index multiplicity = 0;  // rows within kCoincidence of y
  Vector weighted_mean;    // Weiszfeld map over the remaining rows
  double weight_sum = 0.0;
  double pull_norm = 0.0;  // |sum_{i not coincident} (x_i - y)/|x_i - y||
};

DataPointTest weiszfeld_terms(const Eigen::Ref<const Matrix>& x, const Vector& y) {
  DataPointTest t;
  const Index p = x.cols();
  t.weighted_mean = Vector::Zero(p);
  Vector pull = Vector::Zero(p);
  for (Index i = 0; i < x.rows(); ++i) {
    const Vector diff = x.row(i).transpose() - y;
    const double d = diff.norm();
    if (d <= kCoincidence) {
      ++t.multiplicity;
      continue;
    }
    const double w = 1.0 / d;
    t.weight_sum += w;
    t.weighted_mean.noalias() += w * x.row(i).transpose();
    pull.noalias() += w * diff;
  }
  if (t.weight_sum > 0.0) t.weighted_mean /= t.weight_sum;
  t.pull_norm = pull.norm();
  return t;
}

// A data point y with multiplicity k minimizes the objective iff the pull of
// the other points does not exceed k.
bool is_minimizing_data_point(const DataPointTest& t) {
  return t.multiplicity > 0 && t.pull_norm <= static_cast<double>(t.multiplicity);
}

// Strict version: the data point is the unique minimizer. At equality the
// objective can be flat along a segment (even n on a line) and any point of
// it minimizes.
bool is_unique_minimizing_data_point(const DataPointTest& t) {
  return t.multiplicity > 0 && t.pull_norm < static_cast<double>(t.multiplicity) * (1.0 - 1e-10);
}

}  // namespace

void require_sample(const Eigen::Ref<const Matrix>& x, Index min_rows, const std::string& what) {
  if (x.cols() < 1) throw InputError(what + ": sample has no columns");
  if (x.rows() < min_rows) {
    throw InputError(what + ": need at least " + std::to_string(min_rows) + " rows, got " +
                     std::to_string(x.rows()));
  }
  if (!x.allFinite()) throw InputError(what + ": sample contains non-finite entries");
}

Vector spatial_sign(const Eigen::Ref<const Vector>& x) {
  const double norm = x.norm();
  if (norm > 0.0) return x / norm;
  return Vector::Zero(x.size());
}

// Accumulated in extended precision: near the minimizer successive iterates
// differ in objective by far less than double rounding of the sum.
double spatial_median_objective(const Eigen::Ref<const Matrix>& sample,
                                const Eigen::Ref<const Vector>& mu) {
  if (mu.size() != sample.cols()) throw InputError("spatial_median_objective: dimension mismatch");
  long double total = 0.0L;
  for (Index i = 0; i < sample.rows(); ++i) {
    long double sq = 0.0L;
    for (Index j = 0; j < sample.cols(); ++j) {
      const long double d = static_cast<long double>(sample(i, j)) - static_cast<long double>(mu(j));
      sq += d * d;
    }
    total += std::sqrt(sq);
  }
  return static_cast<double>(total);
}

Vector coordinate_median(const Eigen::Ref<const Matrix>& sample) {
  const Index n = sample.rows();
  Vector med(sample.cols());
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Index j = 0; j < sample.cols(); ++j) {
    for (Index i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = sample(i, j);
    const auto mid = column.begin() + n / 2;
    std::nth_element(column.begin(), mid, column.end());
    double m = *mid;
    if (n % 2 == 0) m = 0.5 * (m + *std::max_element(column.begin(), mid));
    med(j) = m;
  }
  return med;
}

LocationEstimate spatial_median(const Eigen::Ref<const Matrix>& sample, const WeiszfeldOptions& options) {
  require_sample(sample, 1, "spatial_median");
  if (!(options.tol > 0.0)) throw InputError("spatial_median: tol must be positive");
  if (options.max_iter < 1) throw InputError("spatial_median: max_iter must be positive");

  LocationEstimate est;
  Vector y = coordinate_median(sample);
  if (options.record_objective) est.objective_trace.push_back(spatial_median_objective(sample, y));

  for (int it = 0; it < options.max_iter; ++it) {
    const DataPointTest t = weiszfeld_terms(sample, y);
    if (t.weight_sum == 0.0 || is_minimizing_data_point(t)) {
      est.converged = true;
      est.final_step_norm = 0.0;
      break;
    }
    Vector next;
    if (t.multiplicity > 0) {
      // Vardi-Zhang step away from a non-optimal data point.
      const double beta = std::min(1.0, static_cast<double>(t.multiplicity) / t.pull_norm);
      next = (1.0 - beta) * t.weighted_mean + beta * y;
    } else {
      next = t.weighted_mean;
    }
    est.final_step_norm = (next - y).norm();
    y = std::move(next);
    est.iterations = it + 1;
    if (options.record_objective) est.objective_trace.push_back(spatial_median_objective(sample, y));
    if (est.final_step_norm <= options.tol) {
      est.converged = true;
      break;
    }
  }

  // Snap to the nearest data point when it is the unique minimizer.
  Index nearest = 0;
  (sample.rowwise() - y.transpose()).rowwise().squaredNorm().minCoeff(&nearest);
  const Vector candidate = sample.row(nearest).transpose();
  if (candidate != y && is_unique_minimizing_data_point(weiszfeld_terms(sample, candidate))) {
    // The modified Weiszfeld step at an optimal data point is zero.
    est.final_step_norm = 0.0;
    y = candidate;
    est.converged = true;
    if (options.record_objective) est.objective_trace.push_back(spatial_median_objective(sample, y));
  }

  est.center = std::move(y);
  return est;
}

Matrix sign_covariance(const Eigen::Ref<const Matrix>& sample, const Eigen::Ref<const Vector>& center) {
  require_sample(sample, 1, "sign_covariance");
  if (center.size() != sample.cols()) {
    throw InputError("sign_covariance: center has length " + std::to_string(center.size()) +
                     ", expected " + std::to_string(sample.cols()));
  }
  Matrix signs = sample.rowwise() - center.transpose();
  for (Index i = 0; i < signs.rows(); ++i) {
    const double norm = signs.row(i).norm();
    if (norm > 0.0) {
      signs.row(i) /= norm;
    } else {
      signs.row(i).setZero();
    }
  }
  Matrix s = (signs.transpose() * signs) / static_cast<double>(sample.rows());
  return 0.5 * (s + s.transpose());
}

Matrix pooled_sign_covariance(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2,
                              Index n1, Index n2) {
  require_square_same(s1, s2);
  if (n1 < 1 || n2 < 1) throw InputError("pooled_sign_covariance: class sizes must be positive");
  const double w1 = static_cast<double>(n1);
  const double w2 = static_cast<double>(n2);
  return (w1 * s1 + w2 * s2) / (w1 + w2);
}

Vector sample_mean(const Eigen::Ref<const Matrix>& sample) {
  require_sample(sample, 1, "sample_mean");
  return sample.colwise().mean().transpose();
}

Matrix ml_covariance(const Eigen::Ref<const Matrix>& sample) {
  require_sample(sample, 1, "ml_covariance");
  const Matrix centered = sample.rowwise() - sample.colwise().mean();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(sample.rows());
  return 0.5 * (cov + cov.transpose());
}

Matrix pooled_sample_covariance(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2) {
  require_sample(s1, 1, "pooled_sample_covariance(class 1)");
  require_sample(s2, 1, "pooled_sample_covariance(class 2)");
  if (s1.cols() != s2.cols()) {
    throw InputError("pooled_sample_covariance: samples have " + std::to_string(s1.cols()) + " and " +
                     std::to_string(s2.cols()) + " columns");
  }
  if (s1.rows() + s2.rows() < 3) throw InputError("pooled_sample_covariance: need n1 + n2 >= 3");
  const double n1 = static_cast<double>(s1.rows());
  const double n2 = static_cast<double>(s2.rows());
  return (n1 * ml_covariance(s1) + n2 * ml_covariance(s2)) / (n1 + n2);
}

Matrix ridge_stabilize(const Eigen::Ref<const Matrix>& s, double rho) {
  if (!(rho >= 0.0)) throw InputError("ridge_stabilize: rho must be non-negative");
  if (s.rows() != s.cols()) throw InputError("ridge_stabilize: matrix is not square");
  Matrix out = s;
  out.diagonal().array() += rho;
  return out;
}

double default_ridge(Index p, Index n) {
  if (p < 1 || n < 1) throw InputError("default_ridge: p and n must be positive");
  return std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

}  // namespace sslda
