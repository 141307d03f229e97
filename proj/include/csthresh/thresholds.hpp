#pragma once

// Recovery thresholds for l1 minimization: fixed-point equations for the
// tail fraction theta and the resulting lower bound on m/n.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csthresh {

enum class ThresholdKind { Strong, Sectional, WeakFixedSupportSigns, WeakNonnegative };

std::string_view to_string(ThresholdKind kind);

/// Accepts "strong", "sectional", "weak", "weak-nonneg" and "nonneg".
/// Throws DomainError on anything else.
ThresholdKind parse_kind(std::string_view name);

struct SolverConfig {
  double eps = 0.0;         // finite-n slack, 0 gives the limiting curve
  double theta_tol = 1e-12; // absolute tolerance on the theta residual
  int max_iter = 200;       // bisection cap
  int threads = 1;          // used by curve() only
};

struct CurvePoint {
  ThresholdKind kind = ThresholdKind::Strong;
  double beta = 0.0;
  double theta_hat = 0.0;
  double alpha_min = 0.0;
  double eps = 0.0;
  double residual = 0.0;
  int iterations = 0;
  // Residual stays negative up to theta = 1: no admissible root, so no
  // undersampling recovers; alpha_min is pinned at 1.
  bool saturated = false;
  bool multiple_roots = false;
  bool no_root = false;

  std::string flags() const;  // '|'-joined, empty when clean
};

/// Left-hand side of the theta equation for `kind`. Zero at theta_hat.
double theta_residual(ThresholdKind kind, double theta, double beta, double eps);

/// Largest root of theta_residual in (beta, 1). Throws NoRootError when the
/// bracket shows no sign change.
double solve_theta(ThresholdKind kind, double beta, const SolverConfig& cfg = {});

/// Solves for theta_hat and evaluates the kind's alpha formula there.
/// beta = 0 maps to alpha_min = 0. A residual that never turns positive
/// yields a saturated point rather than an exception.
CurvePoint alpha_bound(ThresholdKind kind, double beta, const SolverConfig& cfg = {});

/// The alpha formula evaluated at a given theta_hat (no root solve).
double alpha_at_theta(ThresholdKind kind, double beta, double theta_hat);

/// One point per grid value, in grid order. Points with no root are
/// returned with no_root set instead of being dropped.
std::vector<CurvePoint> curve(ThresholdKind kind, const std::vector<double>& beta_grid,
                              const SolverConfig& cfg = {});

/// Smallest beta whose alpha_min reaches `alpha`, by bisection on beta.
double invert_alpha(ThresholdKind kind, double alpha, const SolverConfig& cfg = {});

/// invert_alpha(kind, 1).
double beta_max(ThresholdKind kind, const SolverConfig& cfg = {});

}  // namespace csthresh
