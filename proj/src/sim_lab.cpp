#include "sslda/sim_lab.hpp"

#include <algorithm>
#include <cmath>

namespace sslda {

namespace {

Eigen::LLT<Matrix> factor_pd(const Eigen::Ref<const Matrix>& cov, const char* what) {
  if (cov.rows() != cov.cols() || cov.rows() < 1) throw InputError(std::string(what) + ": covariance must be square");
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": covariance is not positive definite");
  }
  return llt;
}

double radial_factor(const EllipticalLaw& law, Rng& rng) {
  switch (law.kind) {
    case LawKind::normal:
      return 1.0;
    case LawKind::t2_standardized: {
      std::chi_squared_distribution<double> chi2(2.0);
      return 1.0 / std::sqrt(chi2(rng) / 2.0) / std::sqrt(2.0);
    }
    case LawKind::mixture_normal: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const double scale = unif(rng) < law.kappa ? 1.0 : 3.0;
      return scale / std::sqrt(law.kappa + 9.0 * (1.0 - law.kappa));
    }
    case LawKind::cauchy: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return 1.0 / std::abs(normal(rng));
    }
  }
  return 1.0;
}

Sample draw(const EllipticalLaw& law, Index n, const Eigen::Ref<const Vector>& mu, const Matrix& lower, Rng& rng) {
  const Index p = mu.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, p);
  Vector radial(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
    radial(i) = radial_factor(law, rng);
  }
  Sample x = z * lower.transpose();
  x.array().colwise() *= radial.array();
  x.rowwise() += mu.transpose();
  return x;
}

}  // namespace

std::string_view to_string(CovKind kind) {
  switch (kind) {
    case CovKind::compound_symmetry:
      return "compound_symmetry";
    case CovKind::ar1:
      return "ar1";
    case CovKind::explicit_matrix:
      return "explicit";
  }
  return "unknown";
}

CovKind parse_cov_kind(std::string_view text) {
  if (text == "compound_symmetry" || text == "model1") return CovKind::compound_symmetry;
  if (text == "ar1" || text == "model2") return CovKind::ar1;
  if (text == "explicit") return CovKind::explicit_matrix;
  throw InputError("unknown covariance model '" + std::string(text) + "'");
}

CovModel build_sigma(CovKind kind, Index p) {
  if (p < 1) throw InputError("build_sigma: p must be positive");
  CovModel model;
  model.kind = kind;
  model.matrix.resize(p, p);
  switch (kind) {
    case CovKind::compound_symmetry:
      model.matrix.setConstant(0.5);
      model.matrix.diagonal().setOnes();
      break;
    case CovKind::ar1:
      for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) model.matrix(i, j) = std::pow(0.8, static_cast<double>(std::abs(i - j)));
      }
      break;
    case CovKind::explicit_matrix:
      throw InputError("build_sigma: an explicit covariance must be supplied, not built");
  }
  return model;
}

CovModel explicit_sigma(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() < 1) throw InputError("explicit covariance must be square");
  if (!sigma.allFinite()) throw InputError("explicit covariance has non-finite entries");
  if (!sigma.isApprox(sigma.transpose(), 1e-12)) throw InputError("explicit covariance is not symmetric");
  if (Eigen::LLT<Matrix>(sigma).info() != Eigen::Success) {
    throw InputError("explicit covariance is not positive definite");
  }
  return CovModel{CovKind::explicit_matrix, sigma};
}

std::string_view to_string(LawKind kind) {
  switch (kind) {
    case LawKind::normal:
      return "normal";
    case LawKind::t2_standardized:
      return "t2";
    case LawKind::mixture_normal:
      return "mixture";
    case LawKind::cauchy:
      return "cauchy";
  }
  return "unknown";
}

LawKind parse_law(std::string_view text) {
  if (text == "normal") return LawKind::normal;
  if (text == "t2" || text == "t2_standardized") return LawKind::t2_standardized;
  if (text == "mixture" || text == "mixture_normal") return LawKind::mixture_normal;
  if (text == "cauchy") return LawKind::cauchy;
  throw InputError("unknown distribution '" + std::string(text) + "'");
}

Sample sample_elliptical(const EllipticalLaw& law, Index n, const Eigen::Ref<const Vector>& mu,
                         const Eigen::Ref<const Matrix>& cov, Rng& rng) {
  if (n < 1) throw InputError("sample_elliptical: n must be positive");
  if (cov.rows() != mu.size()) throw InputError("sample_elliptical: mean and covariance dimensions differ");
  const Matrix lower = factor_pd(cov, "sample_elliptical").matrixL();
  return draw(law, n, mu, lower, rng);
}

Sample sample_elliptical(const EllipticalLaw& law, Index n, const Eigen::Ref<const Vector>& mu,
                         const Eigen::Ref<const Matrix>& cov, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_elliptical(law, n, mu, cov, rng);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double signal_strength(const Eigen::Ref<const Vector>& delta, const Eigen::Ref<const Matrix>& cov) {
  if (cov.rows() != delta.size()) throw InputError("signal_strength: dimension mismatch");
  const auto llt = factor_pd(cov, "signal_strength");
  return delta.dot(llt.solve(delta));
}

double fisher_oracle_error(const Eigen::Ref<const Vector>& mu1, const Eigen::Ref<const Vector>& mu2,
                           const Eigen::Ref<const Matrix>& cov, const EllipticalLaw& law, Index mc_draws,
                           std::uint64_t seed) {
  if (mu1.size() != mu2.size() || cov.rows() != mu1.size()) {
    throw InputError("fisher_oracle_error: dimension mismatch");
  }
  const Vector delta = mu1 - mu2;
  if (law.kind == LawKind::normal) return normal_cdf(-0.5 * std::sqrt(signal_strength(delta, cov)));

  if (mc_draws < 1) throw InputError("fisher_oracle_error: mc_draws must be positive");
  const auto llt = factor_pd(cov, "fisher_oracle_error");
  DiscriminantModel fisher;
  fisher.gamma = llt.solve(delta);
  fisher.mu1 = mu1;
  fisher.mu2 = mu2;
  return conditional_error_Rn(fisher, mu1, mu2, cov, law, mc_draws, seed);
}

double conditional_error_Rn(const DiscriminantModel& model, const Eigen::Ref<const Vector>& mu1,
                            const Eigen::Ref<const Vector>& mu2, const Eigen::Ref<const Matrix>& cov,
                            const EllipticalLaw& law, Index mc_draws, std::uint64_t seed) {
  if (mc_draws < 1) throw InputError("conditional_error_Rn: mc_draws must be positive");
  if (model.dimension() != mu1.size()) throw InputError("conditional_error_Rn: model dimension mismatch");
  const Matrix lower = factor_pd(cov, "conditional_error_Rn").matrixL();
  Rng rng1 = make_rng(seed, {1});
  Rng rng2 = make_rng(seed, {2});
  const auto pred1 = predict_rows(model, draw(law, mc_draws, mu1, lower, rng1));
  const auto pred2 = predict_rows(model, draw(law, mc_draws, mu2, lower, rng2));
  const auto wrong1 = std::count(pred1.begin(), pred1.end(), 2);
  const auto wrong2 = std::count(pred2.begin(), pred2.end(), 1);
  const double draws = static_cast<double>(mc_draws);
  return 0.5 * (static_cast<double>(wrong1) / draws + static_cast<double>(wrong2) / draws);
}

}  // namespace sslda
