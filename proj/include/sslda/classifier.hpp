#pragma once

// Two-class discriminant rule: fit, cross-validated tuning, prediction and the
// confusion-matrix metric suite.
//
// All flavors classify Z into class 1 iff (Z - (mu1 + mu2)/2)' gamma >= 0.
//   sslda     spatial medians, A = p S + rho I (pooled spatial-sign covariance)
//   lda_clime sample means,    A = Sigma + rho I (pooled ML covariance)
//   ls_lda    sample means,    gamma from the lasso on class-coded responses

#include "sslda/direction_solvers.hpp"
#include "sslda/robust_estimators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sslda {

enum class Flavor { sslda, lda_clime, ls_lda };

std::string_view to_string(Flavor flavor);
// Accepts "sslda", "lda_clime"/"lda-clime", "ls_lda"/"ls-lda".
Flavor parse_flavor(std::string_view text);

struct FitOptions {
  // Ridge added to p S (sslda) or Sigma (lda_clime). Defaults to
  // sqrt(log p / (n1 + n2)).
  std::optional<double> rho;
  WeiszfeldOptions weiszfeld;
  LassoOptions lasso;
};

struct DiscriminantModel {
  Vector gamma;
  Vector mu1;
  Vector mu2;
  double lambda = 0.0;
  Flavor flavor = Flavor::sslda;

  Index dimension() const { return gamma.size(); }
  Index support_size() const;
};

// Centers and direction-problem data computed once per training set and
// reused across a lambda grid.
struct PreparedProblem {
  Flavor flavor = Flavor::sslda;
  Vector mu1;
  Vector mu2;
  Matrix a;  // sslda / lda_clime
  Vector b;
  Matrix design;    // ls_lda: rows centered at the pooled mean
  Vector response;  // ls_lda: n2/n for class 1, -n1/n for class 2
};

PreparedProblem prepare_problem(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2,
                                Flavor flavor, const FitOptions& options = {});

// Upper end of the useful lambda range: |b|_inf for the LP flavors (gamma = 0
// is feasible from there on), |X'y|_inf / n for ls_lda (beta = 0 from there on).
Vector lambda_anchor(const PreparedProblem& problem);

std::vector<double> lambda_grid(const PreparedProblem& problem, int count = 20);

// Throws NumericalError when the solver does not deliver a usable direction.
DiscriminantModel solve_prepared(const PreparedProblem& problem, double lambda, const FitOptions& options = {});

DiscriminantModel fit(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2, double lambda,
                      Flavor flavor, const FitOptions& options = {});

double decision_score(const DiscriminantModel& model, const Eigen::Ref<const Vector>& z);

// 1 or 2; a score of exactly zero goes to class 1.
int predict(const DiscriminantModel& model, const Eigen::Ref<const Vector>& z);
std::vector<int> predict_rows(const DiscriminantModel& model, const Eigen::Ref<const Matrix>& rows);

struct FoldAssignment {
  std::vector<std::vector<Index>> class1_folds;
  std::vector<std::vector<Index>> class2_folds;
  int k = 0;
};

// Stratified folds: each class is shuffled with its own seeded stream and cut
// into k contiguous blocks whose sizes differ by at most one.
FoldAssignment make_folds(Index n1, Index n2, int k, std::uint64_t seed);

struct CvResult {
  std::vector<double> grid;
  std::vector<int> correct;  // held-out correct count per grid value
  std::vector<int> failed_fits;
  double lambda = 0.0;
  std::size_t chosen = 0;
  Index scored = 0;  // n1 + n2
};

/// K-fold cross-validation of lambda. Every fold refits centers and scatter on
/// the retained rows. The chosen lambda maximizes the total held-out correct
/// count; ties go to the largest lambda. A fold whose fit fails scores zero for
/// that lambda.
CvResult cross_validate_lambda(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2,
                               const std::vector<double>& grid, int k, Flavor flavor, std::uint64_t seed,
                               const FitOptions& options = {});

// Cross-validates on the default 20-point grid of the full training set and
// refits at the chosen lambda.
struct TunedFit {
  DiscriminantModel model;
  CvResult cv;
};
TunedFit fit_cv(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2, Flavor flavor, int k,
                std::uint64_t seed, int grid_size = 20, const FitOptions& options = {});

// Class 1 is the positive class. Ratios with a zero denominator are NaN and
// flagged in `defined`.
struct MetricsReport {
  Index tp = 0;
  Index tn = 0;
  Index fp = 0;
  Index fn = 0;
  double specificity = 0.0;
  double sensitivity = 0.0;
  double precision = 0.0;
  double accuracy = 0.0;
  double misclassification_rate = 0.0;
  struct Defined {
    bool specificity = true;
    bool sensitivity = true;
    bool precision = true;
    bool accuracy = true;
  } defined;

  Index total() const { return tp + tn + fp + fn; }
};

MetricsReport evaluate(const std::vector<int>& predicted, const std::vector<int>& truth);

// Repeated stratified train/test splits of a two-class data set. Each
// repetition draws a fresh split, tunes lambda by CV on the training half and
// scores the test half.
struct SplitProtocol {
  Flavor flavor = Flavor::sslda;
  int repetitions = 100;
  double train_fraction = 0.5;
  int folds = 10;
  int grid_size = 20;
  std::uint64_t seed = 1;
};

struct SplitEvaluation {
  std::vector<MetricsReport> per_split;
  std::vector<double> chosen_lambda;
  struct Summary {
    double mean = 0.0;
    double sd = 0.0;
  };
  Summary specificity, sensitivity, precision, accuracy;
};

SplitEvaluation repeated_split_evaluation(const Eigen::Ref<const Matrix>& class1,
                                          const Eigen::Ref<const Matrix>& class2, const SplitProtocol& protocol,
                                          const FitOptions& options = {});

}  // namespace sslda
