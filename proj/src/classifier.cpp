#include "sslda/classifier.hpp"

#include "sslda/random.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>

namespace sslda {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix take_rows(const Eigen::Ref<const Matrix>& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]);
  return out;
}

std::vector<Index> complement(Index n, const std::vector<Index>& held_out) {
  std::vector<bool> skip(static_cast<std::size_t>(n), false);
  for (Index i : held_out) skip[static_cast<std::size_t>(i)] = true;
  std::vector<Index> kept;
  kept.reserve(static_cast<std::size_t>(n) - held_out.size());
  for (Index i = 0; i < n; ++i) {
    if (!skip[static_cast<std::size_t>(i)]) kept.push_back(i);
  }
  return kept;
}

std::vector<std::vector<Index>> shuffled_blocks(Index n, int k, Rng rng) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<Index>> blocks(static_cast<std::size_t>(k));
  const Index base = n / k;
  const Index extra = n % k;
  Index next = 0;
  for (int b = 0; b < k; ++b) {
    const Index size = base + (b < extra ? 1 : 0);
    blocks[static_cast<std::size_t>(b)].assign(order.begin() + next, order.begin() + next + size);
    std::sort(blocks[static_cast<std::size_t>(b)].begin(), blocks[static_cast<std::size_t>(b)].end());
    next += size;
  }
  return blocks;
}

double safe_ratio(Index num, Index den, bool& defined) {
  defined = den > 0;
  return defined ? static_cast<double>(num) / static_cast<double>(den) : kNaN;
}

// Undefined ratios (NaN) are left out.
SplitEvaluation::Summary summarize(const std::vector<double>& all) {
  std::vector<double> values;
  std::copy_if(all.begin(), all.end(), std::back_inserter(values), [](double v) { return std::isfinite(v); });
  SplitEvaluation::Summary s;
  if (values.empty()) {
    s.mean = s.sd = kNaN;
    return s;
  }
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) {
    s.sd = kNaN;
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / (n - 1.0));
  return s;
}

}  // namespace

std::string_view to_string(Flavor flavor) {
  switch (flavor) {
    case Flavor::sslda:
      return "sslda";
    case Flavor::lda_clime:
      return "lda_clime";
    case Flavor::ls_lda:
      return "ls_lda";
  }
  return "unknown";
}

Flavor parse_flavor(std::string_view text) {
  if (text == "sslda") return Flavor::sslda;
  if (text == "lda_clime" || text == "lda-clime") return Flavor::lda_clime;
  if (text == "ls_lda" || text == "ls-lda") return Flavor::ls_lda;
  throw InputError("unknown flavor '" + std::string(text) + "' (expected sslda, lda-clime or ls-lda)");
}

Index DiscriminantModel::support_size() const { return (gamma.array() != 0.0).count(); }

PreparedProblem prepare_problem(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2,
                                Flavor flavor, const FitOptions& options) {
  require_sample(s1, 2, "class 1 sample");
  require_sample(s2, 2, "class 2 sample");
  if (s1.cols() != s2.cols()) {
    throw InputError("class samples have " + std::to_string(s1.cols()) + " and " + std::to_string(s2.cols()) +
                     " columns");
  }
  const Index p = s1.cols();
  const Index n1 = s1.rows();
  const Index n2 = s2.rows();
  const double rho = options.rho.value_or(default_ridge(p, n1 + n2));
  if (!(rho >= 0.0)) throw InputError("ridge rho must be non-negative");

  PreparedProblem prob;
  prob.flavor = flavor;
  switch (flavor) {
    case Flavor::sslda: {
      prob.mu1 = spatial_median(s1, options.weiszfeld).center;
      prob.mu2 = spatial_median(s2, options.weiszfeld).center;
      const Matrix pooled =
          pooled_sign_covariance(sign_covariance(s1, prob.mu1), sign_covariance(s2, prob.mu2), n1, n2);
      prob.a = ridge_stabilize(static_cast<double>(p) * pooled, rho);
      prob.b = prob.mu1 - prob.mu2;
      break;
    }
    case Flavor::lda_clime:
      prob.mu1 = sample_mean(s1);
      prob.mu2 = sample_mean(s2);
      prob.a = ridge_stabilize(pooled_sample_covariance(s1, s2), rho);
      prob.b = prob.mu1 - prob.mu2;
      break;
    case Flavor::ls_lda: {
      prob.mu1 = sample_mean(s1);
      prob.mu2 = sample_mean(s2);
      const double n = static_cast<double>(n1 + n2);
      prob.design.resize(n1 + n2, p);
      prob.design << s1, s2;
      const Eigen::RowVectorXd pooled_mean = prob.design.colwise().mean();
      prob.design.rowwise() -= pooled_mean;
      prob.response.resize(n1 + n2);
      prob.response.head(n1).setConstant(static_cast<double>(n2) / n);
      prob.response.tail(n2).setConstant(-static_cast<double>(n1) / n);
      prob.b = prob.mu1 - prob.mu2;
      break;
    }
  }
  return prob;
}

Vector lambda_anchor(const PreparedProblem& problem) {
  if (problem.flavor == Flavor::ls_lda) {
    return problem.design.transpose() * problem.response / static_cast<double>(problem.design.rows());
  }
  return problem.b;
}

std::vector<double> lambda_grid(const PreparedProblem& problem, int count) {
  if ((problem.mu1.array() == problem.mu2.array()).all()) {
    throw InputError("degenerate problem: the two class centers coincide");
  }
  return default_lambda_grid(lambda_anchor(problem), count);
}

DiscriminantModel solve_prepared(const PreparedProblem& problem, double lambda, const FitOptions& options) {
  if ((problem.mu1.array() == problem.mu2.array()).all()) {
    throw InputError("degenerate problem: the two class centers coincide");
  }
  DiscriminantModel model;
  model.flavor = problem.flavor;
  model.lambda = lambda;
  model.mu1 = problem.mu1;
  model.mu2 = problem.mu2;
  if (problem.flavor == Flavor::ls_lda) {
    LassoResult res = lasso_direction(problem.design, problem.response, lambda, options.lasso);
    if (!res.converged) {
      throw NumericalError("ls_lda: coordinate descent did not converge in " + std::to_string(res.sweeps) +
                           " sweeps (lambda=" + std::to_string(lambda) + ")");
    }
    model.gamma = std::move(res.beta);
  } else {
    DirectionSolution sol = solve_constrained_l1({problem.a, problem.b, lambda});
    if (sol.status == SolveStatus::infeasible_numerically) {
      throw NumericalError(std::string(to_string(problem.flavor)) + ": constrained l1 program infeasible (lambda=" +
                           std::to_string(lambda) + ", residual=" + std::to_string(sol.residual_inf) + ")");
    }
    model.gamma = std::move(sol.gamma);
  }
  if (!model.gamma.allFinite()) {
    throw NumericalError(std::string(to_string(problem.flavor)) + ": non-finite direction");
  }
  return model;
}

DiscriminantModel fit(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2, double lambda,
                      Flavor flavor, const FitOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be finite and non-negative");
  return solve_prepared(prepare_problem(s1, s2, flavor, options), lambda, options);
}

double decision_score(const DiscriminantModel& model, const Eigen::Ref<const Vector>& z) {
  if (z.size() != model.dimension()) {
    throw InputError("observation has " + std::to_string(z.size()) + " features, model expects " +
                     std::to_string(model.dimension()));
  }
  return (z - 0.5 * (model.mu1 + model.mu2)).dot(model.gamma);
}

int predict(const DiscriminantModel& model, const Eigen::Ref<const Vector>& z) {
  return decision_score(model, z) >= 0.0 ? 1 : 2;
}

std::vector<int> predict_rows(const DiscriminantModel& model, const Eigen::Ref<const Matrix>& rows) {
  if (rows.cols() != model.dimension()) {
    throw InputError("data has " + std::to_string(rows.cols()) + " features, model expects " +
                     std::to_string(model.dimension()));
  }
  const Vector midpoint = 0.5 * (model.mu1 + model.mu2);
  const Vector scores = (rows.rowwise() - midpoint.transpose()) * model.gamma;
  std::vector<int> out(static_cast<std::size_t>(rows.rows()));
  for (Index i = 0; i < rows.rows(); ++i) out[static_cast<std::size_t>(i)] = scores(i) >= 0.0 ? 1 : 2;
  return out;
}

FoldAssignment make_folds(Index n1, Index n2, int k, std::uint64_t seed) {
  if (k < 2) throw InputError("fold count must be at least 2");
  if (n1 < k || n2 < k) {
    throw InputError("each class needs at least " + std::to_string(k) + " rows for " + std::to_string(k) +
                     "-fold cross-validation");
  }
  FoldAssignment folds;
  folds.k = k;
  folds.class1_folds = shuffled_blocks(n1, k, make_rng(seed, {1}));
  folds.class2_folds = shuffled_blocks(n2, k, make_rng(seed, {2}));
  return folds;
}

CvResult cross_validate_lambda(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2,
                               const std::vector<double>& grid, int k, Flavor flavor, std::uint64_t seed,
                               const FitOptions& options) {
  if (grid.empty()) throw InputError("cross_validate_lambda: empty lambda grid");
  for (double lambda : grid) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("cross_validate_lambda: invalid lambda in grid");
  }
  const FoldAssignment folds = make_folds(s1.rows(), s2.rows(), k, seed);

  CvResult cv;
  cv.grid = grid;
  cv.correct.assign(grid.size(), 0);
  cv.failed_fits.assign(grid.size(), 0);
  cv.scored = s1.rows() + s2.rows();

  for (int fold = 0; fold < k; ++fold) {
    const auto& held1 = folds.class1_folds[static_cast<std::size_t>(fold)];
    const auto& held2 = folds.class2_folds[static_cast<std::size_t>(fold)];
    const Matrix train1 = take_rows(s1, complement(s1.rows(), held1));
    const Matrix train2 = take_rows(s2, complement(s2.rows(), held2));
    const Matrix test1 = take_rows(s1, held1);
    const Matrix test2 = take_rows(s2, held2);

    PreparedProblem prob;
    try {
      prob = prepare_problem(train1, train2, flavor, options);
    } catch (const std::exception&) {
      for (auto& f : cv.failed_fits) ++f;
      continue;
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
      try {
        const DiscriminantModel model = solve_prepared(prob, grid[g], options);
        const auto pred1 = predict_rows(model, test1);
        const auto pred2 = predict_rows(model, test2);
        cv.correct[g] += static_cast<int>(std::count(pred1.begin(), pred1.end(), 1));
        cv.correct[g] += static_cast<int>(std::count(pred2.begin(), pred2.end(), 2));
      } catch (const InputError&) {
        ++cv.failed_fits[g];
      } catch (const NumericalError&) {
        ++cv.failed_fits[g];
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (cv.correct[g] > cv.correct[best] || (cv.correct[g] == cv.correct[best] && grid[g] > grid[best])) best = g;
  }
  cv.chosen = best;
  cv.lambda = grid[best];
  return cv;
}

TunedFit fit_cv(const Eigen::Ref<const Matrix>& s1, const Eigen::Ref<const Matrix>& s2, Flavor flavor, int k,
                std::uint64_t seed, int grid_size, const FitOptions& options) {
  const PreparedProblem full = prepare_problem(s1, s2, flavor, options);
  const std::vector<double> grid = lambda_grid(full, grid_size);
  TunedFit out;
  out.cv = cross_validate_lambda(s1, s2, grid, k, flavor, seed, options);
  out.model = solve_prepared(full, out.cv.lambda, options);
  return out;
}

MetricsReport evaluate(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw InputError("evaluate: " + std::to_string(predicted.size()) + " predictions for " +
                     std::to_string(truth.size()) + " labels");
  }
  MetricsReport r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predicted[i];
    const int t = truth[i];
    if ((p != 1 && p != 2) || (t != 1 && t != 2)) throw InputError("evaluate: labels must be 1 or 2");
    if (t == 1) {
      (p == 1 ? r.tp : r.fn)++;
    } else {
      (p == 2 ? r.tn : r.fp)++;
    }
  }
  r.specificity = safe_ratio(r.tn, r.tn + r.fp, r.defined.specificity);
  r.sensitivity = safe_ratio(r.tp, r.tp + r.fn, r.defined.sensitivity);
  r.precision = safe_ratio(r.tp, r.tp + r.fp, r.defined.precision);
  r.accuracy = safe_ratio(r.tp + r.tn, r.total(), r.defined.accuracy);
  r.misclassification_rate = r.defined.accuracy ? 1.0 - r.accuracy : kNaN;
  return r;
}

SplitEvaluation repeated_split_evaluation(const Eigen::Ref<const Matrix>& class1,
                                          const Eigen::Ref<const Matrix>& class2, const SplitProtocol& protocol,
                                          const FitOptions& options) {
  if (protocol.repetitions < 1) throw InputError("split evaluation needs at least one repetition");
  if (!(protocol.train_fraction > 0.0 && protocol.train_fraction < 1.0)) {
    throw InputError("train fraction must lie strictly between 0 and 1");
  }
  const auto train_count = [&](Index n) {
    return std::clamp<Index>(static_cast<Index>(std::llround(protocol.train_fraction * static_cast<double>(n))), 1,
                             n - 1);
  };
  const Index t1 = train_count(class1.rows());
  const Index t2 = train_count(class2.rows());

  SplitEvaluation out;
  std::vector<double> spec, sens, prec, acc;
  for (int rep = 0; rep < protocol.repetitions; ++rep) {
    const auto rep_id = static_cast<std::uint64_t>(rep);
    Rng rng1 = make_rng(protocol.seed, {rep_id, 1});
    Rng rng2 = make_rng(protocol.seed, {rep_id, 2});
    std::vector<Index> order1(static_cast<std::size_t>(class1.rows()));
    std::vector<Index> order2(static_cast<std::size_t>(class2.rows()));
    std::iota(order1.begin(), order1.end(), Index{0});
    std::iota(order2.begin(), order2.end(), Index{0});
    std::shuffle(order1.begin(), order1.end(), rng1);
    std::shuffle(order2.begin(), order2.end(), rng2);

    const Matrix train1 = take_rows(class1, {order1.begin(), order1.begin() + t1});
    const Matrix train2 = take_rows(class2, {order2.begin(), order2.begin() + t2});
    const Matrix test1 = take_rows(class1, {order1.begin() + t1, order1.end()});
    const Matrix test2 = take_rows(class2, {order2.begin() + t2, order2.end()});

    const std::uint64_t cv_seed = make_rng(protocol.seed, {rep_id, 3})();
    const TunedFit tuned =
        fit_cv(train1, train2, protocol.flavor, protocol.folds, cv_seed, protocol.grid_size, options);
    std::vector<int> predicted = predict_rows(tuned.model, test1);
    const std::vector<int> predicted2 = predict_rows(tuned.model, test2);
    predicted.insert(predicted.end(), predicted2.begin(), predicted2.end());
    std::vector<int> truth(static_cast<std::size_t>(test1.rows()), 1);
    truth.insert(truth.end(), static_cast<std::size_t>(test2.rows()), 2);

    const MetricsReport m = evaluate(predicted, truth);
    out.per_split.push_back(m);
    out.chosen_lambda.push_back(tuned.model.lambda);
    spec.push_back(m.specificity);
    sens.push_back(m.sensitivity);
    prec.push_back(m.precision);
    acc.push_back(m.accuracy);
  }
  out.specificity = summarize(spec);
  out.sensitivity = summarize(sens);
  out.precision = summarize(prec);
  out.accuracy = summarize(acc);
  return out;
}

}  // namespace sslda
