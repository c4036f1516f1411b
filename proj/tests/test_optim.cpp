#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sevrank/optim.hpp"

using namespace sevrank::optim;

namespace {

double shifted_quadratic(std::span<const double> x, std::span<double> g) {
  double f = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    f += (x[i] - 1.0) * (x[i] - 1.0);
    g[i] = 2.0 * (x[i] - 1.0);
  }
  return f;
}

double rosenbrock(std::span<const double> x, std::span<double> g) {
  const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
  g[0] = -2.0 * a - 400.0 * x[0] * b;
  g[1] = 200.0 * b;
  return a * a + 100.0 * b * b;
}

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

}  // namespace

TEST_CASE("shifted quadratic") {
  auto r = lbfgs_minimize(shifted_quadratic, std::vector<double>(5, 0.0));
  CHECK(r.converged);
  CHECK(r.iterations <= 50);
  for (double xi : r.x) CHECK(std::fabs(xi - 1.0) <= 1e-6);
  CHECK(nonincreasing(r.f_trace));
}

TEST_CASE("rosenbrock") {
  auto r = lbfgs_minimize(rosenbrock, {-1.2, 1.0});
  CHECK(r.converged);
  CHECK(std::fabs(r.x[0] - 1.0) <= 1e-4);
  CHECK(std::fabs(r.x[1] - 1.0) <= 1e-4);
  CHECK(nonincreasing(r.f_trace));
}

TEST_CASE("rosenbrock agrees with a slow gradient-descent oracle") {
  // Plain fixed-step gradient descent, run long, lands in the same basin.
  std::vector<double> x = {-1.2, 1.0}, g(2);
  for (int i = 0; i < 2000000; ++i) {
    rosenbrock(x, g);
    x[0] -= 1e-3 * g[0];
    x[1] -= 1e-3 * g[1];
  }
  auto r = lbfgs_minimize(rosenbrock, {-1.2, 1.0});
  CHECK(std::fabs(r.x[0] - x[0]) <= 1e-3);
  CHECK(std::fabs(r.x[1] - x[1]) <= 1e-3);
}

TEST_CASE("random SPD quadratics match a direct solve") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = dim(rng);
    sevrank::oracle::Dense m(d, std::vector<double>(d)), a(d, std::vector<double>(d, 0.0));
    for (auto& row : m)
      for (auto& v : row) v = u(rng);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) a[i][j] += m[i][k] * m[j][k];
        if (i == j) a[i][j] += 0.5;
      }
    std::vector<double> b(d);
    for (auto& v : b) v = u(rng);
    const Objective f = [&](std::span<const double> x, std::span<double> g) {
      double val = 0;
      for (int i = 0; i < d; ++i) {
        double ax = 0;
        for (int j = 0; j < d; ++j) ax += a[i][j] * x[j];
        g[i] = ax - b[i];
        val += 0.5 * x[i] * ax - b[i] * x[i];
      }
      return val;
    };
    LbfgsConfig cfg;
    cfg.grad_tol = 1e-10;
    auto r = lbfgs_minimize(f, std::vector<double>(d, 0.0), cfg);
    const auto expect = sevrank::oracle::solve(a, b);
    for (int i = 0; i < d; ++i) CHECK(std::fabs(r.x[i] - expect[i]) <= 1e-6);
    CHECK(nonincreasing(r.f_trace));
  }
}

TEST_CASE("memory curvature guard and two-loop direction") {
  LbfgsMemory mem(2);
  CHECK(mem.size() == 0);
  const std::vector<double> g = {1.0, -2.0};
  // No pairs: steepest descent.
  CHECK(mem.direction(g) == std::vector<double>{-1.0, 2.0});
  CHECK_FALSE(mem.push({1.0, 0.0}, {-1.0, 0.0}));
  CHECK_FALSE(mem.push({1e-6, 0.0}, {1e-5, 0.0}));  // s'y = 1e-11
  CHECK(mem.size() == 0);
  CHECK(mem.push({1.0, 0.0}, {2.0, 0.0}));
  CHECK(mem.push({0.0, 1.0}, {0.0, 4.0}));
  CHECK(mem.push({1.0, 1.0}, {2.0, 4.0}));
  CHECK(mem.size() == 2);
  CHECK(mem.min_curvature() > LbfgsMemory::kCurvatureFloor);
  // Exact inverse-Hessian on diag(2,4) after the two axis pairs.
  LbfgsMemory diag(5);
  diag.push({1.0, 0.0}, {2.0, 0.0});
  diag.push({0.0, 1.0}, {0.0, 4.0});
  const auto d = diag.direction(g);
  CHECK(d[0] == doctest::Approx(-0.5));
  CHECK(d[1] == doctest::Approx(0.5));
  CHECK_THROWS(LbfgsMemory(0));
}

TEST_CASE("non-finite objective aborts with the iteration") {
  const Objective bad = [](std::span<const double> x, std::span<double> g) {
    g[0] = 1.0;
    return x[0] < -0.5 ? NAN : x[0];
  };
  try {
    lbfgs_minimize(bad, {0.0});
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.iteration() >= 0);
    CHECK(std::string(e.what()).find("iteration") != std::string::npos);
  }
  const Objective nan_start = [](std::span<const double>, std::span<double> g) {
    g[0] = 0.0;
    return INFINITY;
  };
  CHECK_THROWS_AS(lbfgs_minimize(nan_start, {0.0}), NonFiniteError);
}

TEST_CASE("line-search failure returns best so far") {
  // Gradient points the wrong way: no step decreases f.
  const Objective lying = [](std::span<const double> x, std::span<double> g) {
    g[0] = -1.0;
    return x[0] * x[0] + 1.0;
  };
  LbfgsConfig cfg;
  cfg.max_backtracks = 5;
  auto r = lbfgs_minimize(lying, {0.0}, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.x[0] == 0.0);
  CHECK(r.f_value == 1.0);
}

TEST_CASE("deterministic iterates") {
  auto a = lbfgs_minimize(rosenbrock, {-1.2, 1.0});
  auto b = lbfgs_minimize(rosenbrock, {-1.2, 1.0});
  CHECK(a.f_trace == b.f_trace);
  CHECK(a.x == b.x);
}

TEST_CASE("check_gradient") {
  const Objective sq = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2 * x[0];
    return x[0] * x[0];
  };
  CHECK(check_gradient(sq, std::vector<double>{3.0}, 1e-5) <= 1e-6);
  const Objective lin = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2.0;
    g[1] = -3.0;
    return 2 * x[0] - 3 * x[1] + 1;
  };
  CHECK(check_gradient(lin, std::vector<double>{0.3, -0.7}, 1e-3) <= 1e-12);
  const Objective wrong = [](std::span<const double> x, std::span<double> g) {
    g[0] = 0.0;
    return x[0];
  };
  CHECK(check_gradient(wrong, std::vector<double>{0.0}, 1e-5) == doctest::Approx(1.0));
  CHECK_THROWS(check_gradient(sq, std::vector<double>{1.0}, 0.0));
}
