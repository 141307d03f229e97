#include <doctest.h>

#include <chrono>
#include <cmath>

#include "csthresh/errors.hpp"
#include "csthresh/lp.hpp"
#include "csthresh/rng.hpp"

using namespace csthresh;

namespace {

LinearProgram make(std::initializer_list<double> c, Eigen::MatrixXd A,
                   std::initializer_list<double> b) {
  LinearProgram lp;
  lp.objective = Eigen::Map<const Eigen::VectorXd>(c.begin(), static_cast<Eigen::Index>(c.size()));
  lp.eq_matrix = std::move(A);
  lp.eq_rhs = Eigen::Map<const Eigen::VectorXd>(b.begin(), static_cast<Eigen::Index>(b.size()));
  return lp;
}

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> r) {
  const auto m = static_cast<Eigen::Index>(r.size());
  const auto n = static_cast<Eigen::Index>(r.begin()->size());
  Eigen::MatrixXd A(m, n);
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) A(i, j++) = v;
    ++i;
  }
  return A;
}

// Random LP with a feasible point by construction; the cost is kept
// bounded below on the feasible set by adding a positive shift.
LinearProgram random_lp(CounterRng& rng, int m, int n, bool bounded) {
  LinearProgram lp;
  lp.eq_matrix.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) lp.eq_matrix(i, j) = rng.normal();
  Eigen::VectorXd x0(n);
  for (int j = 0; j < n; ++j) x0(j) = rng.uniform() < 0.4 ? 0.0 : std::abs(rng.normal());
  lp.eq_rhs = lp.eq_matrix * x0;
  lp.objective.resize(n);
  for (int j = 0; j < n; ++j) lp.objective(j) = rng.normal() + (bounded ? 1.5 : 0.0);
  return lp;
}

void check_certificates(const LinearProgram& lp, const LpSolution& s) {
  REQUIRE(s.x.has_value());
  const double bn = lp.eq_rhs.size() ? lp.eq_rhs.cwiseAbs().maxCoeff() : 0.0;
  CHECK((lp.eq_matrix * *s.x - lp.eq_rhs).cwiseAbs().maxCoeff() <= 1e-8 * (1 + bn));
  CHECK(s.x->minCoeff() >= -1e-10);
  CHECK(s.complementarity <= 1e-8 * (1 + std::abs(*s.objective_value)));
}

}  // namespace

TEST_CASE("textbook cases") {
  const auto a = make({1, 0}, rows({{1, 1}}), {1});
  for (const auto& s : {solve_lp(a), vertex_enumerate_oracle(a)}) {
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(*s.objective_value == doctest::Approx(0.0));
    CHECK((*s.x)(0) == doctest::Approx(0.0));
    CHECK((*s.x)(1) == doctest::Approx(1.0));
  }
  const auto inf = make({1}, rows({{1}}), {-1});
  CHECK(solve_lp(inf).status == LpStatus::Infeasible);
  CHECK(vertex_enumerate_oracle(inf).status == LpStatus::Infeasible);

  const auto unb = make({-1, 0}, rows({{0, 1}}), {1});
  CHECK(solve_lp(unb).status == LpStatus::Unbounded);
  CHECK(vertex_enumerate_oracle(unb).status == LpStatus::Unbounded);
}

TEST_CASE("redundant and inconsistent rows") {
  const auto red = make({1, 2, 3}, rows({{1, 1, 1}, {2, 2, 2}, {1, 0, 1}}), {3, 6, 2});
  const auto reduced = make({1, 2, 3}, rows({{1, 1, 1}, {1, 0, 1}}), {3, 2});
  const auto s1 = solve_lp(red);
  const auto s2 = vertex_enumerate_oracle(red);
  const auto s3 = vertex_enumerate_oracle(reduced);
  REQUIRE(s1.status == LpStatus::Optimal);
  CHECK(*s1.objective_value == doctest::Approx(*s3.objective_value));
  CHECK(*s2.objective_value == doctest::Approx(*s3.objective_value));
  check_certificates(red, s1);

  const auto bad = make({1, 1}, rows({{1, 1}, {2, 2}}), {1, 3});
  CHECK(solve_lp(bad).status == LpStatus::Infeasible);
  CHECK(vertex_enumerate_oracle(bad).status == LpStatus::Infeasible);
}

TEST_CASE("degenerate vertex") {
  // Several bases share the optimal vertex x = (0, 0, 1, ...).
  const auto lp = make({1, 1, 0, 1}, rows({{1, -1, 1, 0}, {1, 1, 1, 1}}), {1, 1});
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(*s.objective_value == doctest::Approx(0.0));
  check_certificates(lp, s);
}

TEST_CASE("dimension checks") {
  LinearProgram lp = make({1, 1}, rows({{1, 1}}), {1, 2});
  CHECK_THROWS_AS(solve_lp(lp), DimensionError);
  LinearProgram big;
  big.objective = Eigen::VectorXd::Ones(17);
  big.eq_matrix = Eigen::MatrixXd::Ones(1, 17);
  big.eq_rhs = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(vertex_enumerate_oracle(big), DimensionError);
  CHECK(solve_lp(big).status == LpStatus::Optimal);
}

TEST_CASE("random 4x7 programs match the vertex oracle") {
  CounterRng rng(4, 7);
  for (int t = 0; t < 20; ++t) {
    const auto lp = random_lp(rng, 4, 7, true);
    const auto a = solve_lp(lp);
    const auto b = vertex_enumerate_oracle(lp);
    REQUIRE(a.status == b.status);
    if (a.status == LpStatus::Optimal) {
      CHECK(std::abs(*a.objective_value - *b.objective_value) <= 1e-8);
      check_certificates(lp, a);
    }
  }
}

TEST_CASE("200 random programs match the vertex oracle") {
  CounterRng rng(99, 0);
  int optimal = 0;
  int unbounded = 0;
  for (int t = 0; t < 200; ++t) {
    const int m = 1 + static_cast<int>(rng.below(5));
    const int n = m + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(12 - m)));
    const auto lp = random_lp(rng, m, n, t % 3 != 0);
    const auto a = solve_lp(lp);
    const auto b = vertex_enumerate_oracle(lp);
    INFO("instance " << t << " m=" << m << " n=" << n);
    REQUIRE(a.status == b.status);
    if (a.status == LpStatus::Optimal) {
      ++optimal;
      CHECK(std::abs(*a.objective_value - *b.objective_value) <= 1e-8);
      check_certificates(lp, a);
    } else {
      ++unbounded;
    }
  }
  CHECK(optimal > 100);
  CHECK(unbounded > 0);
}

TEST_CASE("determinism") {
  CounterRng rng(1, 1);
  const auto lp = random_lp(rng, 5, 12, true);
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  CHECK(*a.x == *b.x);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("recovery-sized program finishes quickly") {
  CounterRng rng(3, 3);
  const int m = 100;
  const int n = 200;
  Eigen::MatrixXd A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int j = n - 10; j < n; ++j) x(j) = rng.normal();
  LinearProgram lp;
  lp.eq_matrix.resize(m, 2 * n);
  lp.eq_matrix << A, -A;
  lp.eq_rhs = A * x;
  lp.objective = Eigen::VectorXd::Ones(2 * n);
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = solve_lp(lp);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(s.status == LpStatus::Optimal);
  check_certificates(lp, s);
  CHECK(*s.objective_value == doctest::Approx(x.lpNorm<1>()).epsilon(1e-9));
  MESSAGE("100x400 l1 program: " << s.iterations << " pivots, " << secs << " s");
  CHECK(secs < 5.0);
}
