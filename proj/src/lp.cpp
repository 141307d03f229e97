#include "csthresh/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "csthresh/errors.hpp"

namespace csthresh {

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

void validate(const LinearProgram& lp) {
  const auto rows = lp.eq_matrix.rows();
  const auto cols = lp.eq_matrix.cols();
  if (lp.eq_rhs.size() != rows || lp.objective.size() != cols) {
    throw DimensionError("linear program dimensions disagree");
  }
  if (!lp.eq_matrix.allFinite() || !lp.eq_rhs.allFinite() || !lp.objective.allFinite()) {
    throw DomainError("linear program has non-finite entries");
  }
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

struct Reduced {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  bool consistent = true;
};

// Row echelon elimination on [A | b]. Rows whose A part vanishes are dropped
// when their rhs does too, and flag inconsistency otherwise.
Reduced eliminate_rows(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::MatrixXd M = A;
  Eigen::VectorXd rhs = b;
  const Eigen::Index rows = M.rows();
  const Eigen::Index cols = M.cols();
  const double scale = std::max(1.0, rows > 0 && cols > 0 ? M.cwiseAbs().maxCoeff() : 0.0);
  const double pivot_tol = 1e-11 * scale;
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < cols && rank < rows; ++j) {
    Eigen::Index p = rank;
    M.col(j).segment(rank, rows - rank).cwiseAbs().maxCoeff(&p);
    p += rank;
    if (std::abs(M(p, j)) <= pivot_tol) continue;
    if (p != rank) {
      M.row(p).swap(M.row(rank));
      std::swap(rhs(p), rhs(rank));
    }
    for (Eigen::Index i = rank + 1; i < rows; ++i) {
      const double f = M(i, j) / M(rank, j);
      if (f == 0.0) continue;
      M.row(i) -= f * M.row(rank);
      rhs(i) -= f * rhs(rank);
    }
    ++rank;
  }
  Reduced out;
  const double rhs_tol = 1e-9 * (1.0 + inf_norm(b));
  for (Eigen::Index i = rank; i < rows; ++i) {
    if (std::abs(rhs(i)) > rhs_tol) out.consistent = false;
  }
  out.A = M.topRows(rank);
  out.b = rhs.head(rank);
  return out;
}

class Simplex {
 public:
  Simplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol)
      : A_(A), b_(b), tol_(tol), m_(A.rows()), n_(A.cols()) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (b_(i) < 0.0) {
        b_(i) = -b_(i);
        A_.row(i) *= -1.0;
      }
    }
    basis_.resize(m_);
    is_basic_.assign(n_ + m_, 0);
    for (Eigen::Index i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      is_basic_[n_ + i] = 1;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    xb_ = b_;
  }

  enum class Outcome { Optimal, Unbounded };

  Outcome run(const Eigen::VectorXd& cost) {
    for (;;) {
      if (since_refresh_ >= kRefresh) refactor();
      Eigen::VectorXd cb(m_);
      for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost(basis_[i]);
      const Eigen::VectorXd y = binv_.transpose() * cb;

      // Dantzig pricing; after a run of degenerate pivots switch to Bland's
      // lowest-index rule until the objective moves again. Artificials never
      // re-enter.
      Eigen::Index enter = -1;
      const Eigen::VectorXd d = cost.head(n_) - A_.transpose() * y;
      const bool bland = degenerate_run_ >= kBlandAfter;
      double most_negative = -tol_;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (is_basic_[j] || !(d(j) < -tol_)) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (d(j) < most_negative) {
          most_negative = d(j);
          enter = j;
        }
      }
      if (enter < 0) return Outcome::Optimal;

      const Eigen::VectorXd u = binv_ * A_.col(enter);
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (u(i) <= kPivotTol) continue;
        const double t = std::max(xb_(i), 0.0) / u(i);
        if (leave < 0 || t < best - 1e-15 * std::max(1.0, std::abs(best)) ||
            (std::abs(t - best) <= 1e-15 * std::max(1.0, std::abs(best)) &&
             basis_[i] < basis_[leave])) {
          leave = i;
          best = t;
        }
      }
      if (leave < 0) return Outcome::Unbounded;
      degenerate_run_ = best > 0.0 ? 0 : degenerate_run_ + 1;
      pivot(enter, leave, u);
      if (++iterations_ > kMaxIter) throw NumericalFailure("simplex iteration limit reached");
    }
  }

  // Swap basic artificials for original columns where possible.
  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      const Eigen::RowVectorXd row = binv_.row(i) * A_;
      Eigen::Index pick = -1;
      double mag = 1e-9;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (!is_basic_[j] && std::abs(row(j)) > mag) {
          pick = j;
          mag = std::abs(row(j));
        }
      }
      if (pick < 0) continue;  // redundant row, artificial stays at zero
      pivot(pick, i, binv_ * A_.col(pick));
    }
  }

  void refactor() {
    if (m_ == 0) return;
    Eigen::MatrixXd B(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) B.col(i) = column(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    binv_ = lu.inverse();
    xb_ = lu.solve(b_);
    since_refresh_ = 0;
  }

  double artificial_sum() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) s += std::abs(xb_(i));
    }
    return s;
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x(basis_[i]) = xb_(i);
    }
    return x;
  }

  Eigen::VectorXd duals(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd cb(m_);
    for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost(basis_[i]);
    return binv_.transpose() * cb;
  }

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  int iterations() const { return iterations_; }

 private:
  static constexpr int kRefresh = 50;
  static constexpr int kBlandAfter = 20;
  static constexpr int kMaxIter = 200000;
  static constexpr double kPivotTol = 1e-11;

  Eigen::VectorXd column(Eigen::Index j) const {
    if (j < n_) return A_.col(j);
    return Eigen::VectorXd::Unit(m_, j - n_);
  }

  void pivot(Eigen::Index enter, Eigen::Index leave, const Eigen::VectorXd& u) {
    const double t = std::max(xb_(leave), 0.0) / u(leave);
    xb_ -= t * u;
    xb_(leave) = t;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (xb_(i) < 0.0 && xb_(i) > -1e-12) xb_(i) = 0.0;
    }
    binv_.row(leave) /= u(leave);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i != leave && u(i) != 0.0) binv_.row(i) -= u(i) * binv_.row(leave);
    }
    is_basic_[basis_[leave]] = 0;
    basis_[leave] = enter;
    is_basic_[enter] = 1;
    ++since_refresh_;
  }

  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double tol_;
  Eigen::Index m_;
  Eigen::Index n_;
  std::vector<Eigen::Index> basis_;
  std::vector<char> is_basic_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  int since_refresh_ = 0;
  int iterations_ = 0;
  int degenerate_run_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol) {
  validate(lp);
  if (!(tol > 0.0)) throw DomainError("solve_lp tolerance must be positive");
  const Eigen::Index n = lp.objective.size();
  const double b_norm = inf_norm(lp.eq_rhs);

  LpSolution sol;
  const Reduced red = eliminate_rows(lp.eq_matrix, lp.eq_rhs);
  if (!red.consistent) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  const Eigen::Index m = red.A.rows();

  Simplex sx(red.A, red.b, tol);
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setOnes();
  sx.run(phase1);
  sx.refactor();
  if (sx.artificial_sum() > 1e-9 * (1.0 + b_norm)) {
    sol.status = LpStatus::Infeasible;
    sol.iterations = sx.iterations();
    return sol;
  }
  sx.drive_out_artificials();

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = lp.objective;
  const auto outcome = sx.run(phase2);
  sol.iterations = sx.iterations();
  if (outcome == Simplex::Outcome::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  sx.refactor();

  Eigen::VectorXd x = sx.primal();
  const double min_x = n > 0 ? x.minCoeff() : 0.0;
  if (min_x < -1e-10) throw NumericalFailure("simplex returned a negative basic variable");
  x = x.cwiseMax(0.0);
  const Eigen::VectorXd y = sx.duals(phase2);
  const Eigen::VectorXd d = lp.objective - sx.A().transpose() * y;
  const double obj = lp.objective.dot(x);

  sol.primal_feas = inf_norm(lp.eq_matrix * x - lp.eq_rhs);
  sol.dual_feas = n > 0 ? std::max(0.0, -d.minCoeff()) : 0.0;
  sol.complementarity = std::abs(obj - sx.b().dot(y));
  if (sol.primal_feas > 1e-8 * (1.0 + b_norm)) {
    throw NumericalFailure("primal feasibility certificate failed");
  }
  if (sol.complementarity > 1e-8 * (1.0 + std::abs(obj))) {
    throw NumericalFailure("duality gap certificate failed");
  }
  sol.status = LpStatus::Optimal;
  sol.x = x;
  sol.objective_value = obj;
  return sol;
}

namespace {

struct Vertex {
  double value = 0.0;
  Eigen::VectorXd x;
};

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

// Best basic feasible solution of {A x = b, x >= 0} under cost c, or nothing
// when the system has none.
std::optional<Vertex> best_vertex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& c) {
  const Eigen::Index n = A.cols();
  const double b_norm = inf_norm(b);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-10);
  const Eigen::Index r = A.rows() == 0 ? 0 : lu.rank();
  Eigen::MatrixXd Ab(A.rows(), n + 1);
  Ab << A, b;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_ab(Ab);
  lu_ab.setThreshold(1e-10);
  if (A.rows() > 0 && lu_ab.rank() > r) return std::nullopt;

  std::optional<Vertex> best;
  std::vector<Eigen::Index> idx(r);
  for (Eigen::Index i = 0; i < r; ++i) idx[i] = i;
  for (;;) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    bool ok = true;
    if (r > 0) {
      Eigen::MatrixXd As(A.rows(), r);
      for (Eigen::Index i = 0; i < r; ++i) As.col(i) = A.col(idx[i]);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
      qr.setThreshold(1e-10);
      if (qr.rank() < r) {
        ok = false;
      } else {
        const Eigen::VectorXd xs = qr.solve(b);
        if (inf_norm(As * xs - b) > 1e-9 * (1.0 + b_norm) || xs.minCoeff() < -1e-10) {
          ok = false;
        } else {
          for (Eigen::Index i = 0; i < r; ++i) x(idx[i]) = std::max(xs(i), 0.0);
        }
      }
    } else if (b_norm > 1e-9) {
      ok = false;
    }
    if (ok) {
      const double v = c.dot(x);
      const double tie = 1e-12 * (1.0 + std::abs(v));
      if (!best || v < best->value - tie ||
          (std::abs(v - best->value) <= tie && lex_less(x, best->x))) {
        best = Vertex{v, x};
      }
    }
    // Next r-combination of [0, n).
    Eigen::Index pos = r - 1;
    while (pos >= 0 && idx[pos] == n - r + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (Eigen::Index i = pos + 1; i < r; ++i) idx[i] = idx[i - 1] + 1;
  }
  return best;
}

}  // namespace

LpSolution vertex_enumerate_oracle(const LinearProgram& lp) {
  validate(lp);
  const Eigen::Index n = lp.objective.size();
  if (n > 16) throw DimensionError("vertex_enumerate_oracle supports N <= 16");

  LpSolution sol;
  const auto primal = best_vertex(lp.eq_matrix, lp.eq_rhs, lp.objective);
  if (!primal) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  // Unbounded iff some extreme ray of {A d = 0, d >= 0, sum d = 1} descends.
  Eigen::MatrixXd D(lp.eq_matrix.rows() + 1, n);
  D << lp.eq_matrix, Eigen::RowVectorXd::Ones(n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(D.rows());
  e(D.rows() - 1) = 1.0;
  const auto ray = best_vertex(D, e, lp.objective);
  if (ray && ray->value < -1e-9) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  sol.status = LpStatus::Optimal;
  sol.x = primal->x;
  sol.objective_value = primal->value;
  sol.primal_feas = inf_norm(lp.eq_matrix * primal->x - lp.eq_rhs);
  return sol;
}

}  // namespace csthresh
