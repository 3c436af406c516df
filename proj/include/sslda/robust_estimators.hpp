#pragma once

// Location and scatter estimators: the spatial median and spatial-sign
// covariance used by SSLDA, plus the sample-moment counterparts used by the
// LDA-CLIME and LS-LDA baselines.

#include "sslda/common.hpp"

#include <vector>

namespace sslda {

struct WeiszfeldOptions {
  double tol = 1e-8;  // on the Euclidean norm of one update step
  int max_iter = 500;
  bool record_objective = false;
};

struct LocationEstimate {
  Vector center;
  int iterations = 0;
  double final_step_norm = 0.0;
  bool converged = false;
  // Sum of distances at the start point and after every update; only filled
  // when WeiszfeldOptions::record_objective is set.
  std::vector<double> objective_trace;
};

// U(x) = x / |x|_2, and the zero vector for x = 0.
Vector spatial_sign(const Eigen::Ref<const Vector>& x);

// sum_i |x_i - mu|_2
double spatial_median_objective(const Eigen::Ref<const Matrix>& sample,
                                const Eigen::Ref<const Vector>& mu);

Vector coordinate_median(const Eigen::Ref<const Matrix>& sample);

/// Spatial (geometric) median by the modified Weiszfeld iteration.
///
/// Starts from the coordinate-wise median. When an iterate lands on a data
/// point (within 1e-12) the point is dropped from the weights and the
/// subgradient optimality test decides whether it is the minimizer; if so it is
/// returned exactly. After the loop the nearest data point is tested with the
/// strict form of the same condition, so a data point that is the unique
/// minimizer is always returned bit-exact. When the minimizers form a segment
/// (collinear data with a tie) the iterate inside the segment is kept.
///
/// Non-convergence is reported through `converged == false` with the last
/// iterate in `center`; callers decide whether to accept it.
LocationEstimate spatial_median(const Eigen::Ref<const Matrix>& sample,
                                const WeiszfeldOptions& options = {});

/// (1/n) sum_i U(x_i - center) U(x_i - center)^T.
///
/// Rows equal to the center contribute nothing but still count in n, so the
/// trace is (number of rows != center) / n.
Matrix sign_covariance(const Eigen::Ref<const Matrix>& sample, const Eigen::Ref<const Vector>& center);

// (n1 S1 + n2 S2) / (n1 + n2)
Matrix pooled_sign_covariance(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2,
                              Index n1, Index n2);

Vector sample_mean(const Eigen::Ref<const Matrix>& sample);

// Maximum-likelihood covariance (divisor n) of one sample.
Matrix ml_covariance(const Eigen::Ref<const Matrix>& sample);

// (n1 Sigma1 + n2 Sigma2) / n with per-class ML covariances.
Matrix pooled_sample_covariance(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2);

// S + rho I
Matrix ridge_stabilize(const Eigen::Ref<const Matrix>& s, double rho);

// sqrt(log p / n)
double default_ridge(Index p, Index n);

}  // namespace sslda
