#include "csthresh/recovery.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "csthresh/errors.hpp"
#include "csthresh/lp.hpp"
#include "csthresh/parallel.hpp"
#include "csthresh/rng.hpp"

namespace csthresh {

Instance gaussian_instance(std::size_t n, std::size_t m, std::size_t k, ThresholdKind model,
                           std::uint64_t seed) {
  if (n == 0 || m == 0 || m > n || k > n) {
    throw DimensionError("gaussian_instance needs 1 <= m <= n and k <= n");
  }
  CounterRng rng(seed, 0);
  Instance inst;
  inst.model = model;
  inst.seed = seed;
  inst.k = k;
  inst.A.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) inst.A(i, j) = rng.normal();
  }

  std::vector<std::size_t> support(k);
  if (model == ThresholdKind::Strong) {
    // Partial Fisher-Yates for a uniform k-subset.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.below(n - i);
      std::swap(perm[i], perm[j]);
      support[i] = perm[i];
    }
  } else {
    for (std::size_t i = 0; i < k; ++i) support[i] = n - k + i;
  }

  inst.x_true = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t idx : support) {
    const double mag = std::abs(rng.normal()) + 0.1;
    double sign = 1.0;
    if (model != ThresholdKind::WeakNonnegative) sign = (rng.next_u64() & 1U) ? 1.0 : -1.0;
    inst.x_true(static_cast<Eigen::Index>(idx)) = sign * mag;
  }
  inst.y = inst.A * inst.x_true;
  return inst;
}

namespace {

void require_consistent(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  if (A.rows() != y.size()) throw DimensionError("A and y disagree in length");
}

LpSolution require_optimal(const LinearProgram& lp) {
  LpSolution s = solve_lp(lp);
  if (s.status != LpStatus::Optimal) {
    throw LpStatusError("l1 program is " + std::string(to_string(s.status)));
  }
  return s;
}

}  // namespace

Eigen::VectorXd l1_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  require_consistent(A, y);
  const Eigen::Index n = A.cols();
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Ones(2 * n);
  lp.eq_matrix.resize(A.rows(), 2 * n);
  lp.eq_matrix << A, -A;
  lp.eq_rhs = y;
  const LpSolution s = require_optimal(lp);
  return s.x->head(n) - s.x->tail(n);
}

Eigen::VectorXd nonneg_l1_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  require_consistent(A, y);
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Ones(A.cols());
  lp.eq_matrix = A;
  lp.eq_rhs = y;
  return *require_optimal(lp).x;
}

bool recovery_success(const Eigen::VectorXd& x_true, const Eigen::VectorXd& x_hat) {
  if (x_true.size() != x_hat.size()) throw DimensionError("recovery_success length mismatch");
  return (x_hat - x_true).norm() <= 1e-5 * std::max(1.0, x_true.norm());
}

std::string_view to_string(NspVariant v) {
  switch (v) {
    case NspVariant::Sectional: return "sectional";
    case NspVariant::WeakSigns: return "weak";
    case NspVariant::Nonnegative: return "nonneg";
  }
  return "?";
}

NspVariant parse_nsp_variant(std::string_view name) {
  if (name == "sectional") return NspVariant::Sectional;
  if (name == "weak" || name == "weak-signs") return NspVariant::WeakSigns;
  if (name == "nonneg" || name == "weak-nonneg" || name == "nonnegative") {
    return NspVariant::Nonnegative;
  }
  throw DomainError("unknown NSP variant: " + std::string(name));
}

namespace {

constexpr double kBoundaryTol = 1e-9;

void check_budget(const Eigen::MatrixXd& A, std::size_t k) {
  if (A.cols() > 14 || k > 4) throw DimensionError("NSP check budget is n <= 14, k <= 4");
  if (k > static_cast<std::size_t>(A.cols())) throw DimensionError("k exceeds n");
}

// min sum_{i not in K} |w_i| s.t. A w = 0, sum_K s_i w_i = -1, optionally with
// w >= 0 off K. Empty when no null-space vector meets the normalization.
std::optional<NspWitness> normalized_lp(const Eigen::MatrixXd& A,
                                        const std::vector<std::size_t>& support,
                                        const std::vector<int>& signs, bool nonneg_off_support) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  std::vector<int> s_of(static_cast<std::size_t>(n), 0);
  for (std::size_t t = 0; t < support.size(); ++t) s_of[support[t]] = signs[t];

  // Column layout: w+ for every index, then w- where w may be negative.
  std::vector<Eigen::Index> minus_of;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(nonneg_off_support && s_of[static_cast<std::size_t>(i)] == 0)) minus_of.push_back(i);
  }
  const Eigen::Index cols = n + static_cast<Eigen::Index>(minus_of.size());
  LinearProgram lp;
  lp.eq_matrix = Eigen::MatrixXd::Zero(m + 1, cols);
  lp.eq_rhs = Eigen::VectorXd::Zero(m + 1);
  lp.objective = Eigen::VectorXd::Zero(cols);
  lp.eq_matrix.topLeftCorner(m, n) = A;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int s = s_of[static_cast<std::size_t>(i)];
    lp.eq_matrix(m, i) = s;
    if (s == 0) lp.objective(i) = 1.0;
  }
  for (std::size_t t = 0; t < minus_of.size(); ++t) {
    const Eigen::Index i = minus_of[t];
    const Eigen::Index col = n + static_cast<Eigen::Index>(t);
    lp.eq_matrix.col(col).head(m) = -A.col(i);
    const int s = s_of[static_cast<std::size_t>(i)];
    lp.eq_matrix(m, col) = -s;
    if (s == 0) lp.objective(col) = 1.0;
  }
  lp.eq_rhs(m) = -1.0;

  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) return std::nullopt;
  if (sol.status != LpStatus::Optimal) throw NumericalFailure("NSP program unbounded");
  NspWitness w;
  w.support = support;
  w.signs = signs;
  w.w = sol.x->head(n);
  for (std::size_t t = 0; t < minus_of.size(); ++t) {
    w.w(minus_of[t]) -= (*sol.x)(n + static_cast<Eigen::Index>(t));
  }
  w.value = *sol.objective_value;
  return w;
}

// Folds one (K, s) outcome into the running verdict. Returns true on a
// clear (non-boundary) violation so callers can stop early.
bool record(NspResult& res, const std::optional<NspWitness>& w) {
  if (!w || w->value > 1.0 + kBoundaryTol) return false;
  const bool on_boundary = std::abs(w->value - 1.0) <= kBoundaryTol;
  if (res.holds) {
    res.holds = false;
    res.boundary = on_boundary;
    res.witness = w;
  } else if (res.boundary && !on_boundary) {
    res.boundary = false;
    res.witness = w;
  }
  return !on_boundary;
}

std::vector<int> sign_row(std::size_t k, std::size_t bits) {
  std::vector<int> s(k);
  for (std::size_t t = 0; t < k; ++t) s[t] = ((bits >> t) & 1U) ? 1 : -1;
  return s;
}

// Null vectors living on K with zero coordinate sum keep the l1 norm flat
// along a feasible direction, so recovery is not unique.
bool flat_direction(const Eigen::MatrixXd& A, const std::vector<std::size_t>& support,
                    NspResult& res, int sign) {
  const Eigen::Index k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd M(A.rows() + 1, k);
  for (Eigen::Index t = 0; t < k; ++t) {
    M.col(t).head(A.rows()) = A.col(static_cast<Eigen::Index>(support[t]));
    M(A.rows(), t) = 1.0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-10);
  if (lu.rank() == k) return false;
  NspWitness w;
  w.support = support;
  w.signs.assign(support.size(), sign);
  w.w = Eigen::VectorXd::Zero(A.cols());
  const Eigen::VectorXd v = lu.kernel().col(0);
  for (Eigen::Index t = 0; t < k; ++t) w.w(static_cast<Eigen::Index>(support[t])) = v(t);
  w.value = 0.0;
  res.holds = false;
  res.boundary = false;
  res.witness = w;
  return true;
}

}  // namespace

NspResult nsp_check_strong(const Eigen::MatrixXd& A, std::size_t k) {
  check_budget(A, k);
  NspResult res;
  const std::size_t n = static_cast<std::size_t>(A.cols());
  if (k == 0) return res;
  std::vector<std::size_t> K(k);
  std::iota(K.begin(), K.end(), std::size_t{0});
  for (;;) {
    for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
      if (record(res, normalized_lp(A, K, sign_row(k, bits), false))) return res;
    }
    std::size_t pos = k;
    while (pos > 0 && K[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++K[pos - 1];
    for (std::size_t t = pos; t < k; ++t) K[t] = K[t - 1] + 1;
  }
  return res;
}

NspResult nsp_check_fixed_support(const Eigen::MatrixXd& A, std::size_t k, NspVariant variant) {
  check_budget(A, k);
  NspResult res;
  if (k == 0) return res;
  const std::size_t n = static_cast<std::size_t>(A.cols());
  std::vector<std::size_t> K(k);
  std::iota(K.begin(), K.end(), n - k);
  switch (variant) {
    case NspVariant::Sectional:
      for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
        if (record(res, normalized_lp(A, K, sign_row(k, bits), false))) return res;
      }
      break;
    case NspVariant::WeakSigns:
      // Negative signal on K.
      if (flat_direction(A, K, res, -1)) return res;
      record(res, normalized_lp(A, K, std::vector<int>(k, -1), false));
      break;
    case NspVariant::Nonnegative:
      if (flat_direction(A, K, res, 1)) return res;
      record(res, normalized_lp(A, K, std::vector<int>(k, 1), true));
      break;
  }
  return res;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t ai, std::size_t bi, std::size_t trial) {
  return mix_seed(mix_seed(mix_seed(master, ai), bi), trial);
}

std::vector<PhaseCell> phase_diagram(std::size_t n, const std::vector<double>& alpha_grid,
                                     const std::vector<double>& beta_grid, std::size_t trials,
                                     ThresholdKind model, std::uint64_t seed, int threads) {
  if (trials == 0) throw DimensionError("phase_diagram needs trials >= 1");
  if (n == 0) throw DimensionError("phase_diagram needs n >= 1");
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("alpha grid values must lie in (0, 1]");
  }
  for (double b : beta_grid) {
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("beta grid values must lie in [0, 1]");
  }
  const double dn = static_cast<double>(n);
  std::vector<PhaseCell> cells;
  for (double a : alpha_grid) {
    for (double b : beta_grid) {
      PhaseCell c;
      c.alpha = a;
      c.beta = b;
      c.n = n;
      c.m = static_cast<std::size_t>(std::max(1.0, std::round(a * dn)));
      c.k = static_cast<std::size_t>(std::round(b * dn));
      c.trials = trials;
      c.seed = seed;
      cells.push_back(c);
    }
  }

  // 0 = failure, 1 = success, 2 = LP failure; indexed by (cell, trial).
  std::vector<unsigned char> outcome(cells.size() * trials, 0);
  parallel_for(outcome.size(), threads, [&](std::size_t job) {
    const std::size_t ci = job / trials;
    const std::size_t t = job % trials;
    const std::size_t ai = ci / beta_grid.size();
    const std::size_t bi = ci % beta_grid.size();
    const PhaseCell& c = cells[ci];
    const Instance inst = gaussian_instance(n, c.m, c.k, model, trial_seed(seed, ai, bi, t));
    try {
      const Eigen::VectorXd xh = model == ThresholdKind::WeakNonnegative
                                     ? nonneg_l1_solve(inst.A, inst.y)
                                     : l1_solve(inst.A, inst.y);
      outcome[job] = recovery_success(inst.x_true, xh) ? 1 : 0;
    } catch (const LpStatusError&) {
      outcome[job] = 2;
    } catch (const NumericalFailure&) {
      outcome[job] = 2;
    }
  });
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t t = 0; t < trials; ++t) {
      const unsigned char o = outcome[ci * trials + t];
      if (o == 1) ++cells[ci].successes;
      if (o == 2) ++cells[ci].lp_failures;
    }
  }
  return cells;
}

}  // namespace csthresh
