#include "sevrank/regress.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace sevrank::regress {

namespace {

using features::SparseVector;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// out = (X'X + alpha I) v
void normal_matvec(std::span<const SparseVector> X, double alpha,
                   std::span<const double> v, std::vector<double>& out) {
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = alpha * v[j];
  for (const auto& row : X) {
    const double xv = row.dot(v);
    if (xv == 0.0) continue;
    for (const auto& e : row.entries()) out[e.index] += e.value * xv;
  }
}

std::size_t check_inputs(std::span<const SparseVector> X,
                         std::span<const double> y) {
  if (X.empty()) throw std::invalid_argument("fit_ridge: no samples");
  if (X.size() != y.size()) {
    throw std::invalid_argument("fit_ridge: dimension mismatch, " +
                                std::to_string(X.size()) + " rows vs " +
                                std::to_string(y.size()) + " targets");
  }
  const std::size_t dim = X.front().dim();
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].dim() != dim) {
      throw std::invalid_argument("fit_ridge: dimension mismatch at row " +
                                  std::to_string(i));
    }
  }
  return dim;
}

void put_f64(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

constexpr std::string_view kRidgeMagic = "ridge-v1\n";

}  // namespace

RidgeFit fit_ridge(std::span<const SparseVector> X, std::span<const double> y,
                   const RidgeOptions& options) {
  if (!(options.alpha > 0.0)) {
    throw std::invalid_argument("fit_ridge: alpha must be positive");
  }
  const std::size_t dim = check_inputs(X, y);
  const double mean =
      std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

  std::vector<double> b(dim, 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double yc = y[i] - mean;
    for (const auto& e : X[i].entries()) b[e.index] += e.value * yc;
  }

  RidgeFit fit;
  fit.model.alpha = options.alpha;
  fit.model.intercept = mean;
  fit.model.weights.assign(dim, 0.0);
  fit.rhs_norm = norm(b);
  const double target = options.tol * fit.rhs_norm;
  if (fit.rhs_norm == 0.0) {
    fit.converged = true;
    return fit;
  }

  auto& w = fit.model.weights;
  std::vector<double> r = b;
  std::vector<double> p = r;
  std::vector<double> Ap(dim);
  double rr = dot(r, r);
  while (fit.iterations < options.max_iter) {
    normal_matvec(X, options.alpha, p, Ap);
    const double step = rr / dot(p, Ap);
    for (std::size_t j = 0; j < dim; ++j) {
      w[j] += step * p[j];
      r[j] -= step * Ap[j];
    }
    ++fit.iterations;
    const double rr_next = dot(r, r);
    if (std::sqrt(rr_next) <= target) {
      // The recurrence drifts from the true residual; confirm before stopping.
      normal_matvec(X, options.alpha, w, Ap);
      for (std::size_t j = 0; j < dim; ++j) r[j] = b[j] - Ap[j];
      rr = dot(r, r);
      if (std::sqrt(rr) <= target) break;
      p = r;
      continue;
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t j = 0; j < dim; ++j) p[j] = r[j] + beta * p[j];
  }

  normal_matvec(X, options.alpha, w, Ap);
  for (std::size_t j = 0; j < dim; ++j) r[j] = b[j] - Ap[j];
  fit.residual_norm = norm(r);
  fit.converged = fit.residual_norm <= target;
  return fit;
}

double predict(const RidgeModel& model, const SparseVector& x) {
  if (x.dim() != model.weights.size()) {
    throw std::invalid_argument("predict: dimension mismatch, vector dim " +
                                std::to_string(x.dim()) + ", model dim " +
                                std::to_string(model.weights.size()));
  }
  return x.dot(model.weights) + model.intercept;
}

double ridge_objective(const RidgeModel& model, std::span<const SparseVector> X,
                       std::span<const double> y) {
  check_inputs(X, y);
  const double mean =
      std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double resid = X[i].dot(model.weights) - (y[i] - mean);
    loss += resid * resid;
  }
  return loss + model.alpha * dot(model.weights, model.weights);
}

void write_ridge(std::ostream& out, const RidgeModel& model) {
  out.write(kRidgeMagic.data(), static_cast<std::streamsize>(kRidgeMagic.size()));
  put_f64(out, model.alpha);
  put_f64(out, model.intercept);
  for (double w : model.weights) put_f64(out, w);
}

RidgeModel read_ridge(std::istream& in) {
  const std::string bytes{std::istreambuf_iterator<char>(in),
                          std::istreambuf_iterator<char>()};
  if (!std::string_view(bytes).starts_with(kRidgeMagic)) {
    throw std::runtime_error("not a ridge-v1 model");
  }
  const std::size_t payload = bytes.size() - kRidgeMagic.size();
  if (payload < 16 || payload % 8 != 0) {
    throw std::runtime_error("ridge-v1: payload length " + std::to_string(payload) +
                             " is not 16 + 8k bytes");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) +
                  kRidgeMagic.size();
  RidgeModel model;
  model.alpha = get_f64(p);
  model.intercept = get_f64(p + 8);
  const std::size_t n = (payload - 16) / 8;
  model.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) model.weights[i] = get_f64(p + 16 + 8 * i);
  if (!(model.alpha > 0.0)) throw std::runtime_error("ridge-v1: alpha must be positive");
  return model;
}

void save_ridge(const std::string& path, const RidgeModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_ridge(out, model);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

RidgeModel load_ridge(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return read_ridge(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace sevrank::regress
