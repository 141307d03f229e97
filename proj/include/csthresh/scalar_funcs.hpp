#pragma once

// Special functions and Gaussian order-statistic tail moments.
//
// All quantities here are limits of normalized sums over the top fraction
// of a sorted i.i.d. N(0,1) sample. For a tail fraction theta in (0, 1]:
//
//   tail_m1_abs(theta)    = lim E[sum of top theta*n of |h|]   / n
//   tail_m2_abs(theta)    = lim E[sum of top theta*n of h^2,  ranked by |h|] / n
//   tail_m1_gauss(theta)  = lim E[sum of top theta*n of h]     / n
//   tail_m2_signed(theta) = lim E[sum of h^2 over top theta*n of h] / n
//
// Every function is pure and thread safe.

#include <string_view>

namespace csthresh {

/// Standard error function.
double erf(double x);

/// Inverse error function on (-1, 1). Throws DomainError for |p| >= 1.
double erfinv(double p);

/// Quantile of |X|, X ~ N(0,1), for p in [0, 1).
double inv_cdf_abs(double p);

/// Quantile of X^2 for p in [0, 1). Exactly inv_cdf_abs(p)^2.
double inv_cdf_sq(double p);

/// Quantile of X for p in (0, 1).
double inv_cdf_gauss(double p);

/// Quantile of sign(X) X^2 for p in (0, 1), odd about p = 1/2.
double inv_cdf_signed_sq(double p);

double tail_m1_abs(double theta);
double tail_m2_abs(double theta);
double tail_m1_gauss(double theta);
double tail_m2_signed(double theta);

enum class TailDist { Abs, Sq, Gauss, SignedSq };

std::string_view to_string(TailDist d);

/// Adaptive Gauss-Kronrod evaluation of the upper-tail first moment
/// int_{F^{-1}(q)}^inf t dF(t) of the chosen distribution.
///
/// The lower limit is found by bisection on the CDF (via std::erfc), not via
/// erfinv, so this stays independent of the closed forms it is used to
/// check. For SignedSq the integrand is |t|, i.e. the tail second moment
/// E[X^2; X >= F_c^{-1}(q)]; for q >= 1/2 this coincides with int t dF_d.
double quad_tail_moment(TailDist dist, double q);

}  // namespace csthresh
