#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sevrank/features.hpp"

namespace sevrank::regress {

struct RidgeModel {
  std::vector<double> weights;
  double intercept = 0.0;
  double alpha = 1.0;

  bool operator==(const RidgeModel&) const = default;
};

struct RidgeOptions {
  double alpha = 1.0;
  double tol = 1e-8;
  int max_iter = 1000;
};

struct RidgeFit {
  RidgeModel model;
  int iterations = 0;
  /// ||(X'X + alpha I) w - X'(y - mean(y))|| at the returned weights.
  double residual_norm = 0.0;
  /// ||X'(y - mean(y))||.
  double rhs_norm = 0.0;
  bool converged = false;
};

/// Intercept is mean(y); weights solve (X'X + alpha I) w = X'(y - mean(y))
/// by conjugate gradient with X left uncentered. Stops once the normal
/// equation residual is at most tol * rhs_norm or after max_iter iterations.
RidgeFit fit_ridge(std::span<const features::SparseVector> X,
                   std::span<const double> y, const RidgeOptions& options = {});

/// dot(weights, x) + intercept, unclamped.
double predict(const RidgeModel& model, const features::SparseVector& x);

/// ||X w - (y - mean(y))||^2 + alpha ||w||^2.
double ridge_objective(const RidgeModel& model,
                       std::span<const features::SparseVector> X,
                       std::span<const double> y);

/// `ridge-v1\n`, then alpha, intercept and the weights as little-endian
/// IEEE-754 doubles. The weight count is implied by the file length.
void write_ridge(std::ostream& out, const RidgeModel& model);
RidgeModel read_ridge(std::istream& in);
void save_ridge(const std::string& path, const RidgeModel& model);
RidgeModel load_ridge(const std::string& path);

}  // namespace sevrank::regress
