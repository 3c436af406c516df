#include "sslda/direction_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sslda {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::feasible_suboptimal:
      return "feasible_suboptimal";
    case SolveStatus::infeasible_numerically:
      return "infeasible_numerically";
  }
  return "unknown";
}

namespace {

constexpr double kPrimalTol = 1e-11;  // on the normalized right-hand side
constexpr double kDualTol = 1e-10;
constexpr double kPivotRel = 1e-9;
constexpr int kRefactorEvery = 100;
constexpr int kDegenerateRunBeforeBland = 50;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard form: variables [g+ (p) | g- (p) | slacks (2p)] >= 0, rows
//    A g+ - A g- + s_top = b + lambda
//   -A g+ + A g- + s_bot = lambda - b
// cost 1 on g+/-, 0 on slacks.
class DualSimplex {
 public:
  DualSimplex(const Matrix& a, const Vector& b, double lambda)
      : a_(a), p_(a.rows()), m_(2 * a.rows()), n_(4 * a.rows()) {
    rhs_.resize(m_);
    rhs_.head(p_) = b.array() + lambda;
    rhs_.tail(p_) = lambda - b.array();
    basic_.resize(static_cast<std::size_t>(m_));
    position_.assign(static_cast<std::size_t>(n_), -1);
    for (Index i = 0; i < m_; ++i) set_basic(i, 2 * p_ + i);
    binv_ = Matrix::Identity(m_, m_);
    xb_ = rhs_;
    reduced_ = Vector::Zero(n_);
    reduced_.head(2 * p_).setOnes();
    iteration_cap_ = 20 * static_cast<int>(m_) + 1000;
  }

  SolveStatus run() {
    for (int round = 0; round < 4; ++round) {
      if (!dual_phase()) return SolveStatus::infeasible_numerically;
      refactor();
      if (first_infeasible_row() >= 0) continue;
      if (!primal_cleanup()) return SolveStatus::feasible_suboptimal;
      refactor();
      if (first_infeasible_row() >= 0) continue;
      return SolveStatus::optimal;
    }
    return SolveStatus::feasible_suboptimal;
  }

  Vector gamma() const {
    Vector g = Vector::Zero(p_);
    for (Index i = 0; i < m_; ++i) {
      const Index j = basic_[static_cast<std::size_t>(i)];
      const double v = std::max(0.0, xb_(i));
      if (j < p_) {
        g(j) += v;
      } else if (j < 2 * p_) {
        g(j - p_) -= v;
      }
    }
    return g;
  }

  int pivots() const { return pivots_; }

 private:
  void set_basic(Index row, Index var) {
    basic_[static_cast<std::size_t>(row)] = var;
    position_[static_cast<std::size_t>(var)] = row;
  }
  bool is_basic(Index var) const { return position_[static_cast<std::size_t>(var)] >= 0; }

  Vector column(Index j) const {
    Vector col = Vector::Zero(m_);
    if (j < p_) {
      col.head(p_) = a_.col(j);
      col.tail(p_) = -a_.col(j);
    } else if (j < 2 * p_) {
      col.head(p_) = -a_.col(j - p_);
      col.tail(p_) = a_.col(j - p_);
    } else {
      col(j - 2 * p_) = 1.0;
    }
    return col;
  }

  // v^T a_j for every column j.
  Vector row_products(const Vector& v) const {
    Vector out(n_);
    const Vector structural = a_.transpose() * (v.head(p_) - v.tail(p_));
    out.head(p_) = structural;
    out.segment(p_, p_) = -structural;
    out.tail(m_) = v;
    return out;
  }

  void refactor() {
    Matrix basis(m_, m_);
    for (Index i = 0; i < m_; ++i) basis.col(i) = column(basic_[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Matrix> lu(basis);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
      throw NumericalError("solve_constrained_l1: singular basis on refactorization (rcond=" +
                           std::to_string(rcond) + ", pivots=" + std::to_string(pivots_) +
                           ", p=" + std::to_string(p_) + ")");
    }
    binv_ = lu.inverse();
    xb_ = binv_ * rhs_;
    Vector cost_basic(m_);
    for (Index i = 0; i < m_; ++i) cost_basic(i) = basic_[static_cast<std::size_t>(i)] < 2 * p_ ? 1.0 : 0.0;
    const Vector duals = binv_.transpose() * cost_basic;
    reduced_ = -row_products(duals);
    reduced_.head(2 * p_).array() += 1.0;
    for (Index i = 0; i < m_; ++i) reduced_(basic_[static_cast<std::size_t>(i)]) = 0.0;
    since_refactor_ = 0;
  }

  Index first_infeasible_row() const {
    for (Index i = 0; i < m_; ++i) {
      if (xb_(i) < -kPrimalTol) return i;
    }
    return -1;
  }

  Index choose_leaving_row() const {
    Index row = -1;
    if (bland_) {
      Index best_var = n_;
      for (Index i = 0; i < m_; ++i) {
        const Index var = basic_[static_cast<std::size_t>(i)];
        if (xb_(i) < -kPrimalTol && var < best_var) {
          best_var = var;
          row = i;
        }
      }
    } else {
      double most = -kPrimalTol;
      for (Index i = 0; i < m_; ++i) {
        if (xb_(i) < most) {
          most = xb_(i);
          row = i;
        }
      }
    }
    return row;
  }

  // Dual ratio test on the pivot row `alpha`.
  Index choose_entering(const Vector& alpha) const {
    double largest = 0.0;
    for (Index j = 0; j < n_; ++j) {
      if (!is_basic(j) && alpha(j) < 0.0) largest = std::max(largest, -alpha(j));
    }
    const double piv_tol = std::max(1e-12, kPivotRel * largest);
    double best_ratio = kInf;
    for (Index j = 0; j < n_; ++j) {
      if (is_basic(j) || alpha(j) >= -piv_tol) continue;
      best_ratio = std::min(best_ratio, std::max(reduced_(j), 0.0) / -alpha(j));
    }
    if (best_ratio == kInf) return -1;
    const double tie = best_ratio + 1e-12 * (1.0 + best_ratio);
    Index entering = -1;
    double entering_mag = 0.0;
    for (Index j = 0; j < n_; ++j) {
      if (is_basic(j) || alpha(j) >= -piv_tol) continue;
      if (std::max(reduced_(j), 0.0) / -alpha(j) > tie) continue;
      if (bland_) return j;
      if (-alpha(j) > entering_mag) {
        entering_mag = -alpha(j);
        entering = j;
      }
    }
    return entering;
  }

  void pivot(Index row, Index entering, Vector alpha, const Vector& w) {
    const Index leaving = basic_[static_cast<std::size_t>(row)];
    for (Index i = 0; i < m_; ++i) alpha(basic_[static_cast<std::size_t>(i)]) = 0.0;
    alpha(leaving) = 1.0;
    const double pivot_value = w(row);
    const double step_dual = reduced_(entering) / alpha(entering);
    reduced_ -= step_dual * alpha;
    reduced_(entering) = 0.0;

    const double step_primal = xb_(row) / pivot_value;
    xb_ -= step_primal * w;
    xb_(row) = step_primal;

    const Vector pivot_row = binv_.row(row).transpose() / pivot_value;
    binv_.noalias() -= w * pivot_row.transpose();
    binv_.row(row) = pivot_row.transpose();

    position_[static_cast<std::size_t>(leaving)] = -1;
    set_basic(row, entering);
    ++pivots_;
    ++since_refactor_;
    degenerate_run_ = std::abs(step_dual) <= 1e-14 ? degenerate_run_ + 1 : 0;
    if (degenerate_run_ > kDegenerateRunBeforeBland) bland_ = true;
  }

  // Returns false when a row proves the program infeasible.
  bool dual_phase() {
    bool fresh = true;
    while (pivots_ < iteration_cap_) {
      if (since_refactor_ >= kRefactorEvery) {
        refactor();
        fresh = true;
      }
      const Index row = choose_leaving_row();
      if (row < 0) return true;
      const Vector alpha = row_products(binv_.row(row).transpose());
      const Index entering = choose_entering(alpha);
      if (entering < 0) {
        if (fresh) return false;
        refactor();
        fresh = true;
        continue;
      }
      const Vector w = binv_ * column(entering);
      if (!(w(row) < 0.0) || std::abs(w(row) - alpha(entering)) > 1e-7 * (1.0 + std::abs(w(row)))) {
        if (fresh) {
          throw NumericalError("solve_constrained_l1: unstable pivot after refactorization (pivots=" +
                               std::to_string(pivots_) + ")");
        }
        refactor();
        fresh = true;
        continue;
      }
      pivot(row, entering, alpha, w);
      fresh = false;
    }
    return first_infeasible_row() < 0;
  }

  // Primal simplex with Bland's rule from a primal feasible basis. Returns
  // false if the iteration cap is hit before all reduced costs are >= 0.
  bool primal_cleanup() {
    while (pivots_ < iteration_cap_) {
      Index entering = -1;
      for (Index j = 0; j < n_; ++j) {
        if (!is_basic(j) && reduced_(j) < -kDualTol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;
      const Vector w = binv_ * column(entering);
      double best = kInf;
      for (Index i = 0; i < m_; ++i) {
        if (w(i) > 1e-11) best = std::min(best, std::max(xb_(i), 0.0) / w(i));
      }
      Index row = -1;
      Index best_var = n_;
      for (Index i = 0; i < m_; ++i) {
        if (w(i) <= 1e-11 || std::max(xb_(i), 0.0) / w(i) > best + 1e-14 * (1.0 + best)) continue;
        const Index var = basic_[static_cast<std::size_t>(i)];
        if (var < best_var) {
          best_var = var;
          row = i;
        }
      }
      if (row < 0) throw NumericalError("solve_constrained_l1: unbounded direction in primal cleanup");
      const Vector alpha = row_products(binv_.row(row).transpose());
      pivot(row, entering, alpha, w);
      if (since_refactor_ >= kRefactorEvery) refactor();
    }
    return false;
  }

  const Matrix& a_;
  Index p_, m_, n_;
  Vector rhs_;
  std::vector<Index> basic_;
  std::vector<Index> position_;
  Matrix binv_;
  Vector xb_;
  Vector reduced_;
  int pivots_ = 0;
  int since_refactor_ = 0;
  int degenerate_run_ = 0;
  int iteration_cap_ = 0;
  bool bland_ = false;
};

}  // namespace

DirectionSolution solve_constrained_l1(const L1Program& program) {
  const Index p = program.a.rows();
  if (p < 1 || program.a.cols() != p) throw InputError("solve_constrained_l1: A must be square and non-empty");
  if (program.b.size() != p) {
    throw InputError("solve_constrained_l1: b has length " + std::to_string(program.b.size()) + ", expected " +
                     std::to_string(p));
  }
  if (!program.a.allFinite() || !program.b.allFinite()) {
    throw InputError("solve_constrained_l1: non-finite entries in A or b");
  }
  if (!(program.lambda >= 0.0) || !std::isfinite(program.lambda)) {
    throw InputError("solve_constrained_l1: lambda must be finite and non-negative");
  }

  double scale = program.a.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) scale = std::max(program.b.cwiseAbs().maxCoeff(), 1.0);
  const Matrix a = program.a / scale;
  const Vector b = program.b / scale;

  DualSimplex simplex(a, b, program.lambda / scale);
  DirectionSolution sol;
  sol.status = simplex.run();
  sol.gamma = simplex.gamma();
  sol.pivots = simplex.pivots();
  sol.objective = sol.gamma.lpNorm<1>();
  sol.residual_inf = (program.a * sol.gamma - program.b).lpNorm<Eigen::Infinity>();
  if (sol.status != SolveStatus::infeasible_numerically && sol.residual_inf > program.lambda + 1e-8) {
    sol.status = SolveStatus::infeasible_numerically;
  }
  return sol;
}

std::vector<double> default_lambda_grid(const Eigen::Ref<const Vector>& b, int count) {
  if (count < 2) throw InputError("default_lambda_grid: count must be at least 2");
  const double top = b.size() > 0 ? b.lpNorm<Eigen::Infinity>() : 0.0;
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw InputError("default_lambda_grid: |b|_inf is zero; the two classes have identical centers");
  }
  const double lo = std::log(0.01 * top);
  const double hi = std::log(top);
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    grid[static_cast<std::size_t>(k)] = std::exp(lo + (hi - lo) * k / (count - 1));
  }
  grid.front() = 0.01 * top;
  grid.back() = top;
  return grid;
}

}  // namespace sslda
