#pragma once

// Gaussian-width side: per-kind rearrangement of a Gaussian sample, the
// dual upper bound on the width of the failure set, an exact primal oracle
// for tiny n, and a Monte Carlo estimator compared against sqrt(m).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "csthresh/thresholds.hpp"

namespace csthresh {

struct ScenarioVector {
  ThresholdKind kind = ThresholdKind::Strong;
  std::size_t k = 0;
  std::vector<double> values;
  std::vector<double> z;  // +1 on the first n-k entries, -1 on the last k

  std::size_t n() const { return values.size(); }
};

enum class CMode { Population, ExactDual };

std::string_view to_string(CMode mode);
CMode parse_c_mode(std::string_view name);

struct WidthReport {
  ThresholdKind kind = ThresholdKind::Strong;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  CMode c_mode = CMode::ExactDual;
  double mean_B_over_sqrt_n = 0.0;
  double std_err = 0.0;
  double gordon_budget = 0.0;  // sqrt(m) - 1/(4 sqrt(m))
  bool pass = false;           // mean + 3 std_err < gordon_budget / sqrt(n)
  std::size_t no_feasible_samples = 0;
};

/// Rearranges h for `kind`. Requires 0 < k < h.size().
ScenarioVector scenario_vector(ThresholdKind kind, const std::vector<double>& h, std::size_t k);

/// Largest c in [0, n-k] with nu(c) >= sv_c (sv_0 = -inf), where
/// nu(c) = (sv.z - sum_{i<=c} sv_i) / (n - c). Empty when that nu is negative.
std::optional<std::size_t> select_c_exact(const ScenarioVector& sv);

/// nu(c) as above.
double dual_nu(const ScenarioVector& sv, std::size_t c);

/// Upper bound on max sv.y over the failure set intersected with the unit
/// sphere. Population mode needs population_c.
double dual_width_bound(const ScenarioVector& sv, CMode mode,
                        std::optional<std::size_t> population_c = std::nullopt);

/// Exact primal optimum by active-set enumeration. n <= 12.
double primal_width_oracle(const ScenarioVector& sv);

/// round((1 - theta_hat) n) clamped to [0, n-k]; theta_hat from solve_theta
/// at beta = k/n. Saturated kinds give c = 0.
std::size_t population_c(ThresholdKind kind, std::size_t n, std::size_t k,
                         const SolverConfig& cfg = {});

/// Sample i uses the counter stream (seed, i). Deterministic for any
/// thread count. m = 0 skips the budget comparison.
WidthReport width_monte_carlo(ThresholdKind kind, std::size_t n, std::size_t k,
                              std::size_t samples, std::uint64_t seed, CMode c_mode,
                              std::size_t m = 0, int threads = 1);

}  // namespace csthresh
