#pragma once

// Planted sparse recovery experiments and exact null-space checks.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "csthresh/thresholds.hpp"

namespace csthresh {

struct Instance {
  Eigen::MatrixXd A;
  Eigen::VectorXd x_true;
  Eigen::VectorXd y;
  ThresholdKind model = ThresholdKind::WeakFixedSupportSigns;
  std::uint64_t seed = 0;
  std::size_t k = 0;
};

/// i.i.d. N(0,1) matrix and a k-sparse signal with magnitudes |N(0,1)| + 0.1.
/// Support is the last k indices, except the Strong model which draws a
/// random support. Signs are random, all positive for WeakNonnegative.
/// Requires 1 <= m <= n and k <= n.
Instance gaussian_instance(std::size_t n, std::size_t m, std::size_t k, ThresholdKind model,
                           std::uint64_t seed);

/// argmin ||x||_1 s.t. A x = y. Throws LpStatusError unless the LP is optimal.
Eigen::VectorXd l1_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

/// argmin sum x s.t. A x = y, x >= 0. Throws LpStatusError when infeasible.
Eigen::VectorXd nonneg_l1_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

/// ||x_hat - x_true||_2 <= 1e-5 max(1, ||x_true||_2).
bool recovery_success(const Eigen::VectorXd& x_true, const Eigen::VectorXd& x_hat);

enum class NspVariant { Sectional, WeakSigns, Nonnegative };

std::string_view to_string(NspVariant v);
NspVariant parse_nsp_variant(std::string_view name);

struct NspWitness {
  std::vector<std::size_t> support;  // K, 0-based
  std::vector<int> signs;            // sign row over K
  Eigen::VectorXd w;                 // null-space vector attaining `value`
  double value = 0.0;                // off-support l1 mass after normalization
};

struct NspResult {
  bool holds = true;
  bool boundary = false;  // every violation sits within 1e-9 of the threshold 1
  std::optional<NspWitness> witness;

  std::string_view verdict() const { return holds ? "holds" : (boundary ? "boundary" : "fails"); }
};

/// Every support K of size k and every sign row: n <= 14, k <= 4.
NspResult nsp_check_strong(const Eigen::MatrixXd& A, std::size_t k);

/// Support fixed to the last k indices.
NspResult nsp_check_fixed_support(const Eigen::MatrixXd& A, std::size_t k, NspVariant variant);

struct PhaseCell {
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t lp_failures = 0;
  std::uint64_t seed = 0;
};

/// Seed of one trial: a 64-bit mix of (master, alpha index, beta index, trial).
std::uint64_t trial_seed(std::uint64_t master, std::size_t ai, std::size_t bi, std::size_t trial);

/// Cells in alpha-major order. m = round(alpha n), k = round(beta n).
std::vector<PhaseCell> phase_diagram(std::size_t n, const std::vector<double>& alpha_grid,
                                     const std::vector<double>& beta_grid, std::size_t trials,
                                     ThresholdKind model, std::uint64_t seed, int threads = 1);

}  // namespace csthresh
