#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "csthresh/errors.hpp"
#include "csthresh/rng.hpp"
#include "csthresh/scalar_funcs.hpp"

using namespace csthresh;

namespace {
// Reference values computed with 50-digit arithmetic.
constexpr double kErf1 = 0.8427007929497149;
constexpr double kErfinvHalf = 0.4769362762044699;
constexpr double kPhiInv075 = 0.6744897501960817;
constexpr double kFbInvHalf = 0.4549364231195728;
constexpr double kSqrt2OverPi = 0.7978845608028654;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

TEST_CASE("erf reference values and symmetry") {
  CHECK(csthresh::erf(0.0) == 0.0);
  CHECK(std::abs(csthresh::erf(1.0) - kErf1) <= 1e-15);
  CHECK(csthresh::erf(-2.0) == -csthresh::erf(2.0));
}

TEST_CASE("erfinv reference values and domain") {
  CHECK(erfinv(0.0) == 0.0);
  CHECK(std::abs(erfinv(0.5) - kErfinvHalf) <= 1e-15);
  CHECK(std::abs(erfinv(std::erf(1.3)) - 1.3) <= 1e-13);
  CHECK(erfinv(-0.3) == -erfinv(0.3));
  CHECK_THROWS_AS(erfinv(1.0), DomainError);
  CHECK_THROWS_AS(erfinv(-1.0), DomainError);
  CHECK_THROWS_AS(erfinv(1.5), DomainError);
}

TEST_CASE("erfinv round trip on the 1e-3 grid") {
  double worst = 0.0;
  double prev = -INFINITY;
  for (int i = 0; i <= 2000; ++i) {
    double p = -1.0 + 1e-6 + i * 1e-3;
    if (p >= 1.0 - 1e-6) p = 1.0 - 1e-6;
    const double x = erfinv(p);
    worst = std::max(worst, std::abs(std::erf(x) - p));
    CHECK(x > prev);
    prev = x;
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("inverse CDFs") {
  CHECK(inv_cdf_abs(0.0) == 0.0);
  CHECK(std::abs(inv_cdf_abs(0.5) - kPhiInv075) <= 1e-15);
  CHECK(std::abs(inv_cdf_abs(0.6826894921370859) - 1.0) <= 1e-12);
  CHECK_THROWS_AS(inv_cdf_abs(1.0), DomainError);
  CHECK_THROWS_AS(inv_cdf_abs(-0.1), DomainError);

  CHECK(inv_cdf_sq(0.0) == 0.0);
  CHECK(std::abs(inv_cdf_sq(0.5) - kFbInvHalf) <= 1e-15);
  csthresh::CounterRng rng(7, 0);
  for (int i = 0; i < 100; ++i) {
    const double p = rng.uniform();
    const double a = inv_cdf_abs(p);
    CHECK(inv_cdf_sq(p) == a * a);
  }
  CHECK_THROWS_AS(inv_cdf_sq(1.0), DomainError);

  CHECK(inv_cdf_gauss(0.5) == 0.0);
  CHECK(std::abs(inv_cdf_gauss(0.75) - kPhiInv075) <= 1e-15);
  for (double p : {0.01, 0.2, 0.25, 0.4, 0.49}) {
    CHECK(std::abs(inv_cdf_gauss(1.0 - p) + inv_cdf_gauss(p)) <= 1e-13);
  }
  CHECK_THROWS_AS(inv_cdf_gauss(0.0), DomainError);
  CHECK_THROWS_AS(inv_cdf_gauss(1.0), DomainError);

  CHECK(inv_cdf_signed_sq(0.5) == 0.0);
  CHECK(std::abs(inv_cdf_signed_sq(0.75) - 2.0 * kErfinvHalf * kErfinvHalf) <= 1e-15);
  CHECK(inv_cdf_signed_sq(0.25) == -inv_cdf_signed_sq(0.75));
  CHECK_THROWS_AS(inv_cdf_signed_sq(0.0), DomainError);
}

TEST_CASE("tail moments: endpoints and reference values") {
  CHECK(std::abs(tail_m1_abs(1.0) - kSqrt2OverPi) <= 1e-15);
  CHECK(std::abs(tail_m2_abs(1.0) - 1.0) <= 1e-15);
  CHECK(std::abs(tail_m1_gauss(1.0)) <= 1e-15);
  CHECK(std::abs(tail_m2_signed(1.0) - 1.0) <= 1e-15);
  CHECK(std::abs(tail_m1_gauss(0.5) - kInvSqrt2Pi) <= 1e-15);
  CHECK(std::abs(tail_m2_signed(0.5) - 0.5) <= 1e-15);

  CHECK(std::abs(tail_m1_abs(0.5) - 0.635553145368213868) <= 1e-14);
  CHECK(std::abs(tail_m2_abs(0.5) - 0.928674082255740598) <= 1e-14);
  CHECK(std::abs(tail_m1_gauss(0.25) - 0.317776572684106934) <= 1e-14);
  CHECK(std::abs(tail_m2_signed(0.25) - 0.464337041127870299) <= 1e-14);

  for (auto f : {tail_m1_abs, tail_m2_abs, tail_m1_gauss, tail_m2_signed}) {
    CHECK(f(1e-12) < 1e-10);
    CHECK_THROWS_AS(f(0.0), DomainError);
    CHECK_THROWS_AS(f(1.5), DomainError);
  }
}

TEST_CASE("tail moments strictly increase in theta") {
  for (auto f : {tail_m1_abs, tail_m2_abs, tail_m1_gauss, tail_m2_signed}) {
    double prev = -INFINITY;
    for (int i = 1; i <= 200; ++i) {
      const double v = f(i / 200.0);
      if (f != tail_m1_gauss) CHECK(v > prev);
      prev = v;
    }
  }
  // The signed first moment peaks at theta = 1/2: it adds negative mass beyond.
  CHECK(tail_m1_gauss(0.5) > tail_m1_gauss(0.6));
}

TEST_CASE("quadrature oracle endpoints") {
  CHECK(std::abs(quad_tail_moment(TailDist::Abs, 0.0) - kSqrt2OverPi) <= 1e-11);
  CHECK(std::abs(quad_tail_moment(TailDist::Sq, 0.0) - 1.0) <= 1e-11);
  CHECK(std::abs(quad_tail_moment(TailDist::Gauss, 0.5) - kInvSqrt2Pi) <= 1e-11);
  CHECK_THROWS_AS(quad_tail_moment(TailDist::Abs, 1.0), DomainError);
}

TEST_CASE("closed forms agree with the quadrature oracle") {
  const std::vector<std::pair<TailDist, double (*)(double)>> pairs = {
      {TailDist::Abs, tail_m1_abs},
      {TailDist::Sq, tail_m2_abs},
      {TailDist::Gauss, tail_m1_gauss},
      {TailDist::SignedSq, tail_m2_signed}};
  for (const auto& [dist, f] : pairs) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double q = 0.999 * (i + 0.5) / 50.0;
      worst = std::max(worst, std::abs(f(1.0 - q) - quad_tail_moment(dist, q)));
    }
    INFO("dist = " << to_string(dist));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("law of large numbers for the sorted-magnitude tail") {
  const int n = 100000;
  csthresh::CounterRng rng(2024, 0);
  std::vector<double> h(n);
  for (auto& v : h) v = std::abs(rng.normal());
  std::sort(h.begin(), h.end(), std::greater<>());
  for (double theta : {0.2, 0.5, 0.8}) {
    const int top = static_cast<int>(theta * n);
    const double s = std::accumulate(h.begin(), h.begin() + top, 0.0) / n;
    CHECK(std::abs(s - tail_m1_abs(theta)) <= 5e-3);
  }
}
