#pragma once

// Simulation lab: covariance models, elliptical samplers, Bayes-error oracles
// and the Monte Carlo experiment runner.

#include "sslda/classifier.hpp"
#include "sslda/random.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sslda {

enum class CovKind { compound_symmetry, ar1, explicit_matrix };

struct CovModel {
  CovKind kind = CovKind::compound_symmetry;
  Matrix matrix;

  Index dimension() const { return matrix.rows(); }
};

std::string_view to_string(CovKind kind);
// "compound_symmetry" (alias "model1"), "ar1" (alias "model2").
CovKind parse_cov_kind(std::string_view text);

// compound_symmetry: 1 on the diagonal, 0.5 elsewhere. ar1: 0.8^|i-j|.
// Throws InputError for explicit_matrix (there is nothing to build).
CovModel build_sigma(CovKind kind, Index p);

// Wraps a user-supplied matrix after checking it is symmetric positive definite.
CovModel explicit_sigma(const Matrix& sigma);

enum class LawKind { normal, t2_standardized, mixture_normal, cauchy };

struct EllipticalLaw {
  LawKind kind = LawKind::normal;
  double kappa = 0.8;  // mixture weight of the unit-scale component
};

std::string_view to_string(LawKind kind);
// "normal", "t2" / "t2_standardized", "mixture" / "mixture_normal", "cauchy".
LawKind parse_law(std::string_view text);

/// n draws mu + L r, L the Cholesky factor of `cov`, where r is
///   normal   z
///   t2       z / sqrt(chi2_2 / 2) / sqrt(2)
///   mixture  s z / sqrt(kappa + 9 (1 - kappa)), s = 1 w.p. kappa else 3
///   cauchy   z / |w|, w standard normal
/// Throws NumericalError if `cov` is not positive definite.
Sample sample_elliptical(const EllipticalLaw& law, Index n, const Eigen::Ref<const Vector>& mu,
                         const Eigen::Ref<const Matrix>& cov, Rng& rng);
Sample sample_elliptical(const EllipticalLaw& law, Index n, const Eigen::Ref<const Vector>& mu,
                         const Eigen::Ref<const Matrix>& cov, std::uint64_t seed);

double normal_cdf(double x);

// delta' Sigma^{-1} delta
double signal_strength(const Eigen::Ref<const Vector>& delta, const Eigen::Ref<const Matrix>& cov);

/// Misclassification rate of the Fisher rule with the true parameters.
/// Closed form Phi(-sqrt(Delta_p)/2) for the normal law; for the other laws a
/// Monte Carlo estimate over `mc_draws` fresh points per class.
double fisher_oracle_error(const Eigen::Ref<const Vector>& mu1, const Eigen::Ref<const Vector>& mu2,
                           const Eigen::Ref<const Matrix>& cov, const EllipticalLaw& law, Index mc_draws,
                           std::uint64_t seed);

// Equal-weight Monte Carlo misclassification rate of a fitted rule on fresh
// draws from both populations.
double conditional_error_Rn(const DiscriminantModel& model, const Eigen::Ref<const Vector>& mu1,
                            const Eigen::Ref<const Vector>& mu2, const Eigen::Ref<const Matrix>& cov,
                            const EllipticalLaw& law, Index mc_draws, std::uint64_t seed);

struct ExperimentSpec {
  EllipticalLaw law;
  CovModel cov;
  Index p = 100;
  Index n1 = 200;
  Index n2 = 200;
  Index n_test_per_class = 200;
  Index s0 = 10;
  int reps = 100;
  std::uint64_t base_seed = 1;
  std::vector<Flavor> methods{Flavor::sslda, Flavor::lda_clime, Flavor::ls_lda};
  int folds = 10;
  int grid_size = 20;
  int threads = 1;  // replications run concurrently when > 1; results do not depend on it

  Vector mu1() const;  // zero
  Vector mu2() const;  // s0 leading ones, then zeros
};

// Throws InputError naming the offending field.
void validate(const ExperimentSpec& spec);

/// Parses the JSON form, e.g.
///   {"law": "cauchy", "cov": "compound_symmetry", "p": 100, "n1": 200, "n2": 200,
///    "n_test_per_class": 200, "s0": 10, "reps": 20, "base_seed": 1,
///    "methods": ["sslda", "lda_clime"], "folds": 10, "grid_size": 20}
/// "cov" may also be {"kind": "explicit", "matrix": [[...], ...]}. Missing
/// optional fields take the defaults above. Throws InputError with the field
/// name (and the parser's line/column for syntax errors).
ExperimentSpec parse_experiment_spec(const nlohmann::json& doc);
ExperimentSpec parse_experiment_spec_text(const std::string& text);
nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);

struct MethodOutcome {
  Flavor method = Flavor::sslda;
  bool ok = false;
  double error_rate = 0.0;  // test misclassification rate in [0, 1]
  double lambda = 0.0;
  std::string failure;
};

struct ReplicationResult {
  int replication = 0;
  std::uint64_t seed = 0;
  std::vector<MethodOutcome> outcomes;  // in spec.methods order
};

struct MethodSummary {
  Flavor method = Flavor::sslda;
  double mean_error_pct = 0.0;
  double sd_pct = 0.0;  // NaN when fewer than two successful replications
  bool sd_defined = false;
  int succeeded = 0;
  int failed = 0;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ReplicationResult> replications;  // sorted by replication index
  std::vector<MethodSummary> summary;           // in spec.methods order

  // Largest fraction of failed replications over methods.
  double worst_failure_fraction() const;
};

/// Replication r uses seed base_seed + r: fresh train (n1, n2) and test
/// (n_test_per_class per class) draws, lambda tuned by K-fold CV per method,
/// refit, test error. Failed replications are excluded from the mean and sd
/// and counted in `failed`.
ExperimentResult run_experiment(const ExperimentSpec& spec);

ReplicationResult run_replication(const ExperimentSpec& spec, int replication);

struct SweepRow {
  Index s0 = 0;
  MethodSummary summary;
  double oracle_error_pct = 0.0;
};

// One run_experiment per s0 value (other fields from `base`).
std::vector<SweepRow> sparsity_sweep(const ExperimentSpec& base, const std::vector<Index>& s0_values);

// Table writers with fixed formatting: errors as percentages with 2 decimals,
// an empty sd cell when it is undefined.
std::string results_csv(const ExperimentResult& result);
std::string sweep_csv(const ExperimentSpec& base, const std::vector<SweepRow>& rows);
nlohmann::json results_json(const ExperimentResult& result);

}  // namespace sslda
