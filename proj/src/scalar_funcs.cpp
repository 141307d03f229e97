#include "csthresh/scalar_funcs.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "csthresh/errors.hpp"

namespace csthresh {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2 pi)

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + ": probability outside [0,1]");
  }
}

void require_tail_fraction(double theta, const char* what) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw DomainError(std::string(what) + ": tail fraction outside (0,1]");
  }
}

// Single-precision-grade rational/polynomial start (M. Giles), refined below.
double erfinv_initial(double x) {
  double w = -std::log((1.0 - x) * (1.0 + x));
  double p;
  if (w < 5.0) {
    w -= 2.5;
    p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
  } else {
    w = std::sqrt(w) - 3.0;
    p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
  }
  return p * x;
}

}  // namespace

double erf(double x) { return std::erf(x); }

double erfinv(double p) {
  if (!(std::abs(p) < 1.0)) {
    throw DomainError("erfinv: argument must lie in (-1, 1)");
  }
  if (p == 0.0) return 0.0;
  if (p < 0.0) return -erfinv(-p);

  constexpr double kTwoOverSqrtPi = std::numbers::inv_sqrtpi * 2.0;
  double x = erfinv_initial(p);
  // For p > 1/2 the complement 1-p is exact, so the residual is formed from
  // erfc to keep relative accuracy in the upper tail.
  const double comp = 1.0 - p;
  for (int step = 0; step < 2; ++step) {
    const double resid = p > 0.5 ? comp - std::erfc(x) : std::erf(x) - p;
    x -= resid / (kTwoOverSqrtPi * std::exp(-x * x));
  }
  return x;
}

double inv_cdf_abs(double p) {
  require_probability(p, "inv_cdf_abs");
  if (p == 1.0) throw DomainError("inv_cdf_abs: infinite quantile at p = 1");
  return kSqrt2 * erfinv(p);
}

double inv_cdf_sq(double p) {
  const double a = inv_cdf_abs(p);
  return a * a;
}

double inv_cdf_gauss(double p) {
  require_probability(p, "inv_cdf_gauss");
  if (p == 0.0 || p == 1.0) {
    throw DomainError("inv_cdf_gauss: infinite quantile at p in {0,1}");
  }
  return kSqrt2 * erfinv(2.0 * p - 1.0);
}

double inv_cdf_signed_sq(double p) {
  require_probability(p, "inv_cdf_signed_sq");
  if (p == 0.0 || p == 1.0) {
    throw DomainError("inv_cdf_signed_sq: infinite quantile at p in {0,1}");
  }
  const double u = 2.0 * p - 1.0;
  const double e = erfinv(std::abs(u));
  return std::copysign(2.0 * e * e, u);
}

double tail_m1_abs(double theta) {
  require_tail_fraction(theta, "tail_m1_abs");
  const double q = 1.0 - theta;
  if (q >= 1.0) return 0.0;
  const double e = erfinv(q);
  return std::sqrt(2.0 / std::numbers::pi) * std::exp(-e * e);
}

double tail_m2_abs(double theta) {
  require_tail_fraction(theta, "tail_m2_abs");
  const double q = 1.0 - theta;
  if (q >= 1.0) return 0.0;
  // (1/sqrt(2pi)) (sqrt(2pi) + 2 sqrt(Fb) e^{-Fb/2} - sqrt(2pi) q), with
  // sqrt(Fb) = a, rearranged so small theta does not cancel.
  const double a = kSqrt2 * erfinv(q);
  return theta + 2.0 * a * normal_pdf(a);
}

double tail_m1_gauss(double theta) {
  require_tail_fraction(theta, "tail_m1_gauss");
  const double u = 1.0 - 2.0 * theta;  // 2(1-theta) - 1
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return normal_pdf(kSqrt2 * erfinv(u));
}

double tail_m2_signed(double theta) {
  require_tail_fraction(theta, "tail_m2_signed");
  const double u = 1.0 - 2.0 * theta;
  if (u <= -1.0) return 1.0;
  if (u >= 1.0) return 0.0;
  // Signed lower limit x0 = F_c^{-1}(1-theta). For theta <= 1/2 (x0 >= 0)
  // this is the sign(X)X^2 closed form; above 1/2 it equals one minus the
  // mirrored lower-tail integral.
  const double x0 = kSqrt2 * erfinv(u);
  return theta + x0 * normal_pdf(x0);
}

std::string_view to_string(TailDist d) {
  switch (d) {
    case TailDist::Abs: return "abs";
    case TailDist::Sq: return "sq";
    case TailDist::Gauss: return "gauss";
    case TailDist::SignedSq: return "signed_sq";
  }
  return "?";
}

namespace {

// Gauss-Kronrod 7/15 nodes on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
  double value;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double tol, int depth) {
  const GkResult whole = gk15(f, a, b);
  if (whole.error <= tol || depth >= 40) return whole.value;
  const double mid = 0.5 * (a + b);
  return adaptive(f, a, mid, 0.5 * tol, depth + 1) +
         adaptive(f, mid, b, 0.5 * tol, depth + 1);
}

// Solve upper_tail(x) = target for decreasing upper_tail by bisection.
double bisect_upper_tail(const std::function<double(double)>& upper_tail,
                         double target) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (upper_tail(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

constexpr double kTruncation = 1e-14;

}  // namespace

double quad_tail_moment(TailDist dist, double q) {
  require_probability(q, "quad_tail_moment");
  if (q == 1.0) throw DomainError("quad_tail_moment: q must be < 1");

  const bool folded = dist == TailDist::Abs || dist == TailDist::Sq;
  // Upper-tail probability of the underlying variable (|X| or X) beyond x.
  const std::function<double(double)> upper =
      folded ? std::function<double(double)>(
                   [](double x) { return x <= 0.0 ? 1.0 : std::erfc(x / kSqrt2); })
             : std::function<double(double)>(
                   [](double x) { return 0.5 * std::erfc(x / kSqrt2); });

  const double lower = (folded && q == 0.0)
                           ? 0.0
                           : bisect_upper_tail(upper, std::max(1.0 - q, 0.0) >= 1.0 - kTruncation
                                                          ? 1.0 - kTruncation
                                                          : 1.0 - q);
  const double upper_limit = bisect_upper_tail(upper, kTruncation);
  if (lower >= upper_limit) return 0.0;

  const double density_scale = folded ? 2.0 : 1.0;
  std::function<double(double)> integrand;
  switch (dist) {
    case TailDist::Abs:
    case TailDist::Gauss:
      integrand = [density_scale](double x) { return density_scale * x * normal_pdf(x); };
      break;
    case TailDist::Sq:
    case TailDist::SignedSq:
      integrand = [density_scale](double x) { return density_scale * x * x * normal_pdf(x); };
      break;
  }
  return adaptive(integrand, lower, upper_limit, 1e-13, 0);
}

}  // namespace csthresh
