#include "csthresh/thresholds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "csthresh/errors.hpp"
#include "csthresh/parallel.hpp"
#include "csthresh/scalar_funcs.hpp"

namespace csthresh {

std::string_view to_string(ThresholdKind kind) {
  switch (kind) {
    case ThresholdKind::Strong: return "strong";
    case ThresholdKind::Sectional: return "sectional";
    case ThresholdKind::WeakFixedSupportSigns: return "weak";
    case ThresholdKind::WeakNonnegative: return "weak-nonneg";
  }
  return "?";
}

ThresholdKind parse_kind(std::string_view name) {
  if (name == "strong") return ThresholdKind::Strong;
  if (name == "sectional") return ThresholdKind::Sectional;
  if (name == "weak") return ThresholdKind::WeakFixedSupportSigns;
  if (name == "weak-nonneg" || name == "nonneg") return ThresholdKind::WeakNonnegative;
  throw DomainError("unknown threshold kind: " + std::string(name));
}

std::string CurvePoint::flags() const {
  std::string out;
  auto add = [&out](const char* f) {
    if (!out.empty()) out += '|';
    out += f;
  };
  if (saturated) add("saturated");
  if (multiple_roots) add("multiple_roots");
  if (no_root) add("no_root");
  return out;
}

namespace {

constexpr double kSqrt2OverPi = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kEdge = 1e-12;

void require_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
}

void require_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("eps must lie in [0, 1)");
}

// Fraction of the off-support block that lies outside the tail.
double off_support_ratio(double theta, double beta) { return (1.0 - theta) / (1.0 - beta); }

}  // namespace

double theta_residual(ThresholdKind kind, double theta, double beta, double eps) {
  require_beta(beta);
  require_eps(eps);
  if (!(theta > beta && theta <= 1.0)) throw DomainError("theta must lie in (beta, 1]");
  const double shrink = 1.0 - eps;
  const double grow = 1.0 + eps;
  switch (kind) {
    case ThresholdKind::Strong: {
      const double lhs = shrink * (tail_m1_abs(theta) - 2.0 * tail_m1_abs(beta)) / theta;
      return lhs - std::numbers::sqrt2 * erfinv(grow * (1.0 - theta));
    }
    case ThresholdKind::WeakFixedSupportSigns: {
      const double q = off_support_ratio(theta, beta);
      const double lhs = shrink * (1.0 - beta) * tail_m1_abs(1.0 - q) / theta;
      return lhs - std::numbers::sqrt2 * erfinv(grow * q);
    }
    case ThresholdKind::Sectional: {
      const double q = off_support_ratio(theta, beta);
      const double lhs =
          shrink * ((1.0 - beta) * tail_m1_abs(1.0 - q) - kSqrt2OverPi * beta) / theta;
      return lhs - std::numbers::sqrt2 * erfinv(grow * q);
    }
    case ThresholdKind::WeakNonnegative: {
      const double q = off_support_ratio(theta, beta);
      const double lhs = shrink * (1.0 - beta) * tail_m1_gauss(1.0 - q) / theta;
      return lhs - std::numbers::sqrt2 * erfinv(2.0 * grow * q - 1.0);
    }
  }
  throw DomainError("bad kind");
}

double alpha_at_theta(ThresholdKind kind, double beta, double theta_hat) {
  switch (kind) {
    case ThresholdKind::Strong: {
      const double m1 = tail_m1_abs(theta_hat) - 2.0 * tail_m1_abs(beta);
      return tail_m2_abs(theta_hat) - m1 * m1 / theta_hat;
    }
    case ThresholdKind::WeakFixedSupportSigns: {
      const double t = 1.0 - off_support_ratio(theta_hat, beta);
      const double m1 = (1.0 - beta) * tail_m1_abs(t);
      return (1.0 - beta) * tail_m2_abs(t) + beta - m1 * m1 / theta_hat;
    }
    case ThresholdKind::Sectional: {
      const double t = 1.0 - off_support_ratio(theta_hat, beta);
      const double m1 = (1.0 - beta) * tail_m1_abs(t) - kSqrt2OverPi * beta;
      return (1.0 - beta) * tail_m2_abs(t) + beta - m1 * m1 / theta_hat;
    }
    case ThresholdKind::WeakNonnegative: {
      const double t = 1.0 - off_support_ratio(theta_hat, beta);
      const double m1 = (1.0 - beta) * tail_m1_gauss(t);
      return (1.0 - beta) * tail_m2_signed(t) + beta - m1 * m1 / theta_hat;
    }
  }
  throw DomainError("bad kind");
}

namespace {

enum class RootStatus { Found, AllNegative, AllPositive };

struct RootResult {
  RootStatus status = RootStatus::Found;
  double theta = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool multiple = false;
};

// Lowest theta at which every erfinv argument stays inside (-1, 1).
double domain_floor(ThresholdKind kind, double beta, double eps) {
  if (eps == 0.0) return beta;
  if (kind == ThresholdKind::Strong) return std::max(beta, eps / (1.0 + eps));
  return std::max(beta, 1.0 - (1.0 - beta) / (1.0 + eps));
}

RootResult find_root(ThresholdKind kind, double beta, const SolverConfig& cfg) {
  require_beta(beta);
  require_eps(cfg.eps);
  if (!(cfg.theta_tol > 0.0)) throw DomainError("theta_tol must be positive");

  // Offsets scale with 1-beta so the bracket stays non-empty as beta -> 1,
  // but never drop below a few ulps of 1.
  const double span = 1.0 - beta;
  const double offset = std::max(kEdge * span, 8.0 * std::numeric_limits<double>::epsilon());
  double lo = beta + offset;
  const double hi = 1.0 - offset;
  const double floor = domain_floor(kind, beta, cfg.eps);
  if (floor > beta) lo = std::max(lo, floor + 1e-9 * span);
  if (!(lo < hi)) throw NoRootError("empty theta bracket");

  auto res = [&](double t) { return theta_residual(kind, t, beta, cfg.eps); };

  constexpr int kScan = 256;
  std::array<double, kScan> ts{};
  std::array<double, kScan> rs{};
  for (int i = 0; i < kScan; ++i) {
    ts[i] = i == kScan - 1 ? hi : lo + (hi - lo) * i / (kScan - 1);
    rs[i] = res(ts[i]);
  }

  int changes = 0;
  int last = -1;
  for (int i = 0; i + 1 < kScan; ++i) {
    if ((rs[i] < 0.0) != (rs[i + 1] < 0.0)) {
      ++changes;
      last = i;
    }
  }
  RootResult out;
  if (last < 0) {
    out.status = rs[0] < 0.0 ? RootStatus::AllNegative : RootStatus::AllPositive;
    out.theta = hi;
    out.residual = rs[kScan - 1];
    return out;
  }
  out.multiple = changes > 1;

  double a = ts[last];
  double b = ts[last + 1];
  double ra = rs[last];
  double rb = rs[last + 1];
  double best = std::abs(ra) < std::abs(rb) ? a : b;
  double best_r = std::abs(ra) < std::abs(rb) ? ra : rb;
  int it = 0;
  while (it < cfg.max_iter && std::abs(best_r) > cfg.theta_tol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double rm = res(mid);
    ++it;
    if (std::abs(rm) < std::abs(best_r)) {
      best = mid;
      best_r = rm;
    }
    if ((rm < 0.0) == (ra < 0.0)) {
      a = mid;
      ra = rm;
    } else {
      b = mid;
      rb = rm;
    }
  }
  out.theta = best;
  out.residual = best_r;
  out.iterations = it;
  return out;
}

}  // namespace

double solve_theta(ThresholdKind kind, double beta, const SolverConfig& cfg) {
  const RootResult r = find_root(kind, beta, cfg);
  if (r.status != RootStatus::Found) {
    throw NoRootError(std::string("no sign change of the theta residual for ") +
                      std::string(to_string(kind)) + " at beta = " + std::to_string(beta));
  }
  return r.theta;
}

CurvePoint alpha_bound(ThresholdKind kind, double beta, const SolverConfig& cfg) {
  CurvePoint p;
  p.kind = kind;
  p.beta = beta;
  p.eps = cfg.eps;
  if (beta == 0.0) {
    p.theta_hat = 0.0;
    p.alpha_min = 0.0;
    return p;
  }
  const RootResult r = find_root(kind, beta, cfg);
  p.residual = r.residual;
  p.iterations = r.iterations;
  p.multiple_roots = r.multiple;
  switch (r.status) {
    case RootStatus::Found:
      p.theta_hat = r.theta;
      p.alpha_min = alpha_at_theta(kind, beta, r.theta);
      break;
    case RootStatus::AllNegative:
      // Failure set covers the whole sphere: width bound is ||h||, which
      // corresponds to alpha = 1.
      p.theta_hat = 1.0;
      p.alpha_min = 1.0;
      p.saturated = true;
      break;
    case RootStatus::AllPositive:
      throw NoRootError(std::string("theta residual positive on the whole bracket for ") +
                        std::string(to_string(kind)) + " at beta = " + std::to_string(beta));
  }
  return p;
}

std::vector<CurvePoint> curve(ThresholdKind kind, const std::vector<double>& beta_grid,
                              const SolverConfig& cfg) {
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    const double b = beta_grid[i];
    if (!(b > 0.0 && b < 1.0)) throw DomainError("curve grid values must lie in (0, 1)");
    if (i > 0 && !(b > beta_grid[i - 1])) {
      throw DomainError("curve grid must be strictly increasing");
    }
  }
  std::vector<CurvePoint> out(beta_grid.size());
  parallel_for(beta_grid.size(), cfg.threads, [&](std::size_t i) {
    try {
      out[i] = alpha_bound(kind, beta_grid[i], cfg);
    } catch (const NoRootError&) {
      CurvePoint p;
      p.kind = kind;
      p.beta = beta_grid[i];
      p.eps = cfg.eps;
      p.theta_hat = std::numeric_limits<double>::quiet_NaN();
      p.alpha_min = std::numeric_limits<double>::quiet_NaN();
      p.no_root = true;
      out[i] = p;
    }
  });
  return out;
}

double invert_alpha(ThresholdKind kind, double alpha, const SolverConfig& cfg) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  // Weak curves reach alpha = 1 only as beta -> 1; 1 - 1e-10 gets within
  // 1e-9 of it for every kind.
  double lo = 1e-8;
  double hi = 1.0 - 1e-10;
  auto f = [&](double b) { return alpha_bound(kind, b, cfg).alpha_min; };
  if (f(hi) < alpha - 1e-9) {
    throw NoRootError("alpha not reached by " + std::string(to_string(kind)) + " curve");
  }
  if (f(lo) >= alpha) return lo;
  for (int it = 0; it < cfg.max_iter && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= alpha) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double beta_max(ThresholdKind kind, const SolverConfig& cfg) {
  return invert_alpha(kind, 1.0, cfg);
}

}  // namespace csthresh
