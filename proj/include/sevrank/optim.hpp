#pragma once

#include <deque>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sevrank::optim {

struct LbfgsConfig {
  int memory = 10;
  int max_iter = 200;
  /// Converged once the infinity norm of the gradient is at most this.
  double grad_tol = 1e-6;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 50;
};

struct OptimResult {
  std::vector<double> x;
  double f_value = 0.0;
  /// Infinity norm of the gradient at x.
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective at x0 followed by the objective after each accepted step.
  std::vector<double> f_trace;
};

/// Fills `grad` (already sized to x) and returns the objective value.
using Objective =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Thrown when the objective or its gradient is not finite.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Bounded (s, y) history and the two-loop recursion over it.
class LbfgsMemory {
 public:
  explicit LbfgsMemory(int capacity);

  /// Stores the pair unless s'y <= kCurvatureFloor. Returns whether stored.
  bool push(std::vector<double> s, std::vector<double> y);
  /// -H g, with H scaled by gamma = s'y / y'y of the newest pair (1 if none).
  std::vector<double> direction(std::span<const double> grad) const;
  void clear();

  std::size_t size() const noexcept { return pairs_.size(); }
  /// Smallest s'y among stored pairs (+inf when empty).
  double min_curvature() const;

  static constexpr double kCurvatureFloor = 1e-10;

 private:
  struct Pair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;  // 1 / s'y
  };
  std::size_t capacity_;
  std::deque<Pair> pairs_;
};

/// L-BFGS with Armijo backtracking from a unit step. A pair rejected by the
/// curvature guard also drops the stored history. Accepted objective values
/// never increase. A line search that exhausts its backtracks returns the
/// current point with converged = false.
OptimResult lbfgs_minimize(const Objective& f, std::vector<double> x0,
                           const LbfgsConfig& config = {});

/// Max over coordinates of |fd_i - g_i| / max(1, |g_i|) with central
/// differences of step h.
double check_gradient(const Objective& f, std::span<const double> x, double h);

}  // namespace sevrank::optim
