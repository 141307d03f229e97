#pragma once

// Dense standard-form linear programs: min c.x s.t. A x = b, x >= 0.

#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace csthresh {

struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::optional<Eigen::VectorXd> x;
  std::optional<double> objective_value;
  double primal_feas = 0.0;      // ||A x - b||_inf
  double dual_feas = 0.0;        // max(0, -min reduced cost)
  double complementarity = 0.0;  // |c.x - b.y|
  int iterations = 0;
};

/// Two-phase revised simplex: Dantzig pricing with a fallback to Bland's
/// rule on degenerate stalls. Optimal results satisfy
/// ||Ax-b||_inf <= 1e-8 (1 + ||b||_inf), x >= -1e-10 and a duality gap of
/// at most 1e-8 (1 + |c.x|); otherwise NumericalFailure is thrown.
/// `tol` is the reduced-cost tolerance.
LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-9);

/// Brute force over all basic feasible solutions; N <= 16. Ties go to the
/// lexicographically smallest x.
LpSolution vertex_enumerate_oracle(const LinearProgram& lp);

}  // namespace csthresh
