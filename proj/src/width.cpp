#include "csthresh/width.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "csthresh/errors.hpp"
#include "csthresh/parallel.hpp"
#include "csthresh/rng.hpp"

namespace csthresh {

std::string_view to_string(CMode mode) {
  return mode == CMode::Population ? "population" : "exact";
}

CMode parse_c_mode(std::string_view name) {
  if (name == "population") return CMode::Population;
  if (name == "exact" || name == "exact-dual") return CMode::ExactDual;
  throw DomainError("unknown c mode: " + std::string(name));
}

ScenarioVector scenario_vector(ThresholdKind kind, const std::vector<double>& h, std::size_t k) {
  const std::size_t n = h.size();
  if (k == 0 || k >= n) throw DimensionError("scenario_vector needs 0 < k < n");
  ScenarioVector sv;
  sv.kind = kind;
  sv.k = k;
  sv.values.resize(n);
  sv.z.assign(n, 1.0);
  const std::size_t off = n - k;
  for (std::size_t i = off; i < n; ++i) sv.z[i] = -1.0;

  switch (kind) {
    case ThresholdKind::Strong:
      std::transform(h.begin(), h.end(), sv.values.begin(), [](double v) { return std::abs(v); });
      std::sort(sv.values.begin(), sv.values.end());
      break;
    case ThresholdKind::Sectional:
    case ThresholdKind::WeakFixedSupportSigns:
      std::transform(h.begin(), h.begin() + off, sv.values.begin(),
                     [](double v) { return std::abs(v); });
      std::sort(sv.values.begin(), sv.values.begin() + off);
      for (std::size_t i = off; i < n; ++i) {
        sv.values[i] = kind == ThresholdKind::Sectional ? std::abs(h[i]) : h[i];
      }
      break;
    case ThresholdKind::WeakNonnegative:
      std::copy(h.begin(), h.begin() + off, sv.values.begin());
      std::sort(sv.values.begin(), sv.values.begin() + off);
      for (std::size_t i = off; i < n; ++i) sv.values[i] = -h[i];
      break;
  }
  return sv;
}

namespace {

double dot_z(const ScenarioVector& sv) {
  double s = 0.0;
  for (std::size_t i = 0; i < sv.n(); ++i) s += sv.values[i] * sv.z[i];
  return s;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Largest c whose prefix satisfies nu(c) >= sv_c, together with nu(c).
// The admissible c form a prefix of [0, n-k], so the scan stops at the
// first failure.
std::pair<std::size_t, double> largest_admissible(const ScenarioVector& sv) {
  const std::size_t n = sv.n();
  const std::size_t cmax = n - sv.k;
  double prefix = 0.0;
  const double s = dot_z(sv);
  std::size_t c = 0;
  double nu = s / static_cast<double>(n);
  for (std::size_t next = 1; next <= cmax; ++next) {
    const double cand = (s - (prefix + sv.values[next - 1])) / static_cast<double>(n - next);
    if (!(cand >= sv.values[next - 1])) break;
    prefix += sv.values[next - 1];
    c = next;
    nu = cand;
  }
  return {c, nu};
}

void require_well_formed(const ScenarioVector& sv) {
  if (sv.k == 0 || sv.k >= sv.n() || sv.z.size() != sv.n()) {
    throw DimensionError("malformed scenario vector");
  }
}

}  // namespace

double dual_nu(const ScenarioVector& sv, std::size_t c) {
  require_well_formed(sv);
  if (c > sv.n() - sv.k) throw DimensionError("c outside [0, n-k]");
  double s = dot_z(sv);
  for (std::size_t i = 0; i < c; ++i) s -= sv.values[i];
  return s / static_cast<double>(sv.n() - c);
}

std::optional<std::size_t> select_c_exact(const ScenarioVector& sv) {
  require_well_formed(sv);
  const auto [c, nu] = largest_admissible(sv);
  if (nu < 0.0) return std::nullopt;
  return c;
}

double dual_width_bound(const ScenarioVector& sv, CMode mode,
                        std::optional<std::size_t> population_c) {
  require_well_formed(sv);
  const std::size_t n = sv.n();
  const std::size_t off = n - sv.k;

  // sum_{i>c} sv_i^2 - (n-c) nu^2, summed as squares to avoid cancellation
  // when the bound is close to zero.
  auto closed_form = [&](std::size_t c, double nu) {
    double s = 0.0;
    for (std::size_t i = c; i < n; ++i) {
      const double d = sv.values[i] - nu * sv.z[i];
      s += d * d;
    }
    return std::sqrt(s);
  };

  if (mode == CMode::ExactDual) {
    const auto [c, nu] = largest_admissible(sv);
    if (nu >= 0.0) return closed_form(c, nu);
    // Dual optimum sits at nu = 0.
    double s = 0.0;
    for (std::size_t i = 0; i < off; ++i) {
      const double v = std::max(sv.values[i], 0.0);
      s += v * v;
    }
    for (std::size_t i = off; i < n; ++i) s += sv.values[i] * sv.values[i];
    return std::sqrt(s);
  }

  if (!population_c) throw DimensionError("population mode needs a c value");
  const std::size_t c = *population_c;
  if (c > off) throw DimensionError("population c outside [0, n-k]");
  const double nu = dual_nu(sv, c);
  const bool zeta_ok = c == 0 || nu - sv.values[c - 1] > 0.0;
  if (zeta_ok && nu >= 0.0) return closed_form(c, nu);
  return norm2(sv.values);
}

double primal_width_oracle(const ScenarioVector& sv) {
  require_well_formed(sv);
  const std::size_t n = sv.n();
  if (n > 12) throw DimensionError("primal_width_oracle supports n <= 12");
  const std::size_t off = n - sv.k;
  // Coordinates carrying y_i >= 0.
  const bool all_signed =
      sv.kind == ThresholdKind::Strong || sv.kind == ThresholdKind::Sectional;
  const std::size_t nc = all_signed ? n : off;
  constexpr double kTol = 1e-12;

  double best = 0.0;
  std::vector<double> y(n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << nc); ++mask) {
    auto is_free = [&](std::size_t i) { return i >= nc || !((mask >> i) & 1U); };

    // Linear constraint inactive: y proportional to sv on the free set.
    {
      double nn = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = is_free(i) ? sv.values[i] : 0.0;
        nn += y[i] * y[i];
      }
      const double r = std::sqrt(nn);
      if (r > best) {
        bool ok = true;
        double zy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i < nc && y[i] < -kTol * r) ok = false;
          zy += sv.z[i] * y[i];
        }
        if (ok && zy <= kTol * r) best = r;
      }
    }
    // Linear constraint tight: project onto the complement of z on the free set.
    {
      double zz = 0.0;
      double zs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!is_free(i)) continue;
        zz += 1.0;
        zs += sv.z[i] * sv.values[i];
      }
      if (zz == 0.0) continue;
      double nn = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = is_free(i) ? sv.values[i] - (zs / zz) * sv.z[i] : 0.0;
        nn += y[i] * y[i];
      }
      const double r = std::sqrt(nn);
      if (r > best) {
        bool ok = true;
        for (std::size_t i = 0; i < nc; ++i) {
          if (y[i] < -kTol * r) ok = false;
        }
        if (ok) best = r;
      }
    }
  }
  return best;
}

std::size_t population_c(ThresholdKind kind, std::size_t n, std::size_t k,
                         const SolverConfig& cfg) {
  if (k == 0 || k >= n) throw DimensionError("population_c needs 0 < k < n");
  const double beta = static_cast<double>(k) / static_cast<double>(n);
  const CurvePoint p = alpha_bound(kind, beta, cfg);
  const double c = std::round((1.0 - p.theta_hat) * static_cast<double>(n));
  return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(n - k)));
}

WidthReport width_monte_carlo(ThresholdKind kind, std::size_t n, std::size_t k,
                              std::size_t samples, std::uint64_t seed, CMode c_mode,
                              std::size_t m, int threads) {
  if (samples < 2) throw DimensionError("width_monte_carlo needs at least 2 samples");
  if (k == 0 || k >= n) throw DimensionError("width_monte_carlo needs 0 < k < n");

  std::optional<std::size_t> pc;
  if (c_mode == CMode::Population) pc = population_c(kind, n, k);

  std::vector<double> values(samples);
  std::vector<char> infeasible(samples, 0);
  parallel_for(samples, threads, [&](std::size_t s) {
    CounterRng rng(seed, s);
    std::vector<double> h(n);
    for (auto& v : h) v = rng.normal();
    const ScenarioVector sv = scenario_vector(kind, h, k);
    if (c_mode == CMode::ExactDual && !select_c_exact(sv)) infeasible[s] = 1;
    values[s] = dual_width_bound(sv, c_mode, pc) / std::sqrt(static_cast<double>(n));
  });

  WidthReport r;
  r.kind = kind;
  r.n = n;
  r.k = k;
  r.m = m;
  r.samples = samples;
  r.seed = seed;
  r.c_mode = c_mode;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / samples;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  r.mean_B_over_sqrt_n = mean;
  r.std_err = std::sqrt(ss / static_cast<double>(samples - 1) / static_cast<double>(samples));
  r.no_feasible_samples =
      static_cast<std::size_t>(std::count(infeasible.begin(), infeasible.end(), 1));
  if (m > 0) {
    const double sm = std::sqrt(static_cast<double>(m));
    r.gordon_budget = sm - 1.0 / (4.0 * sm);
    r.pass = mean + 3.0 * r.std_err < r.gordon_budget / std::sqrt(static_cast<double>(n));
  }
  return r;
}

}  // namespace csthresh
