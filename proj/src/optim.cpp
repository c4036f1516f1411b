#include "sevrank/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sevrank::optim {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double evaluate(const Objective& f, std::span<const double> x,
                std::span<double> grad, int iteration) {
  const double value = f(x, grad);
  if (!std::isfinite(value) || !all_finite(grad)) {
    throw NonFiniteError("non-finite objective or gradient at iteration " +
                             std::to_string(iteration),
                         iteration);
  }
  return value;
}

}  // namespace

LbfgsMemory::LbfgsMemory(int capacity) {
  if (capacity < 1) throw std::invalid_argument("L-BFGS memory must be >= 1");
  capacity_ = static_cast<std::size_t>(capacity);
}

bool LbfgsMemory::push(std::vector<double> s, std::vector<double> y) {
  const double sy = dot(s, y);
  if (!(sy > kCurvatureFloor)) return false;
  if (pairs_.size() == capacity_) pairs_.pop_front();
  pairs_.push_back({std::move(s), std::move(y), 1.0 / sy});
  return true;
}

void LbfgsMemory::clear() { pairs_.clear(); }

double LbfgsMemory::min_curvature() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs_) m = std::min(m, 1.0 / p.rho);
  return m;
}

std::vector<double> LbfgsMemory::direction(std::span<const double> grad) const {
  std::vector<double> q(grad.begin(), grad.end());
  std::vector<double> alpha(pairs_.size());
  for (std::size_t k = pairs_.size(); k-- > 0;) {
    const auto& p = pairs_[k];
    alpha[k] = p.rho * dot(p.s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * p.y[i];
  }
  double gamma = 1.0;
  if (!pairs_.empty()) {
    const auto& last = pairs_.back();
    gamma = (1.0 / last.rho) / dot(last.y, last.y);
  }
  for (double& v : q) v *= gamma;
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto& p = pairs_[k];
    const double beta = p.rho * dot(p.y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * p.s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

OptimResult lbfgs_minimize(const Objective& f, std::vector<double> x0,
                           const LbfgsConfig& config) {
  if (!(config.armijo_c > 0.0 && config.armijo_c < 1.0) ||
      !(config.backtrack_factor > 0.0 && config.backtrack_factor < 1.0) ||
      config.max_iter < 0 || config.max_backtracks < 0) {
    throw std::invalid_argument("invalid L-BFGS configuration");
  }
  const std::size_t n = x0.size();
  LbfgsMemory memory(config.memory);

  OptimResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n);
  result.f_value = evaluate(f, result.x, grad, 0);
  result.grad_norm = inf_norm(grad);
  result.f_trace.push_back(result.f_value);

  std::vector<double> trial(n);
  std::vector<double> trial_grad(n);
  while (result.grad_norm > config.grad_tol && result.iterations < config.max_iter) {
    const int iteration = result.iterations + 1;
    std::vector<double> dir = memory.direction(grad);
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      // Lost positive definiteness numerically; restart from steepest descent.
      memory.clear();
      dir = memory.direction(grad);
      slope = dot(grad, dir);
    }

    double step = 1.0;
    double f_trial = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = result.x[i] + step * dir[i];
      f_trial = evaluate(f, trial, trial_grad, iteration);
      if (f_trial <= result.f_value + config.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= config.backtrack_factor;
    }
    if (!accepted) return result;

    std::vector<double> s(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial[i] - result.x[i];
      y[i] = trial_grad[i] - grad[i];
    }
    // A rejected pair means the stored curvature no longer describes the
    // local geometry; keeping it stalls progress on non-convex valleys.
    if (!memory.push(std::move(s), std::move(y))) memory.clear();

    result.x.swap(trial);
    grad.swap(trial_grad);
    result.f_value = f_trial;
    result.grad_norm = inf_norm(grad);
    result.iterations = iteration;
    result.f_trace.push_back(f_trial);
  }
  result.converged = result.grad_norm <= config.grad_tol;
  return result;
}

double check_gradient(const Objective& f, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("check_gradient: h must be positive");
  const std::size_t n = x.size();
  std::vector<double> analytic(n);
  evaluate(f, x, analytic, 0);
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> scratch(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    probe[i] = x[i] + h;
    const double up = evaluate(f, probe, scratch, 0);
    probe[i] = x[i] - h;
    const double down = evaluate(f, probe, scratch, 0);
    probe[i] = x[i];
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - analytic[i]) / std::max(1.0, std::abs(analytic[i])));
  }
  return worst;
}

}  // namespace sevrank::optim
