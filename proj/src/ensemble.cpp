#include "sevrank/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "sevrank/csv.hpp"

namespace sevrank::ensemble {

namespace {

void require_unique(const std::vector<std::string>& names, const char* what) {
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      throw std::invalid_argument(std::string("duplicate ") + what + " '" + n + "'");
    }
  }
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> average_ranks(const std::vector<double>& col) {
  std::vector<std::size_t> order(col.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
  std::vector<double> ranks(col.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && col[order[j + 1]] == col[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

ScoreMatrix::ScoreMatrix(std::vector<std::string> comment_ids,
                         std::vector<std::string> model_names,
                         std::vector<double> values)
    : ids_(std::move(comment_ids)),
      models_(std::move(model_names)),
      values_(std::move(values)) {
  require_unique(ids_, "comment id");
  require_unique(models_, "model name");
  if (values_.size() != ids_.size() * models_.size()) {
    throw std::invalid_argument("score matrix shape mismatch");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw std::invalid_argument("non-finite score for comment '" +
                                  ids_[k / models_.size()] + "', model '" +
                                  models_[k % models_.size()] + "'");
    }
  }
}

std::vector<double> ScoreMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

std::size_t ScoreMatrix::row_of(std::string_view id) const {
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (ids_[r] == id) return r;
  }
  throw std::out_of_range("unknown comment id '" + std::string(id) + "'");
}

Normalization parse_normalization(std::string_view name) {
  if (name == "none") return Normalization::none;
  if (name == "minmax") return Normalization::minmax;
  if (name == "zscore") return Normalization::zscore;
  if (name == "rank") return Normalization::rank;
  throw std::invalid_argument("unknown normalization mode '" + std::string(name) + "'");
}

std::string_view to_string(Normalization mode) {
  switch (mode) {
    case Normalization::none: return "none";
    case Normalization::minmax: return "minmax";
    case Normalization::zscore: return "zscore";
    case Normalization::rank: return "rank";
  }
  return "none";
}

ScoreMatrix normalize_scores(const ScoreMatrix& matrix, Normalization mode) {
  if (mode == Normalization::none) return matrix;
  const std::size_t n = matrix.rows();
  const std::size_t k = matrix.cols();
  std::vector<double> out(matrix.values().begin(), matrix.values().end());
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> col = matrix.column(c);
    switch (mode) {
      case Normalization::minmax: {
        if (n == 0) break;
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        const double min = *lo;
        const double range = *hi - *lo;
        for (auto& v : col) v = range > 0.0 ? (v - min) / range : 0.5;
        break;
      }
      case Normalization::zscore: {
        if (n == 0) break;
        const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double v : col) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(n));
        for (auto& v : col) v = sd > 0.0 ? (v - mean) / sd : 0.0;
        break;
      }
      case Normalization::rank: {
        if (n == 1) {
          col[0] = 0.5;
          break;
        }
        const std::vector<double> ranks = average_ranks(col);
        for (std::size_t r = 0; r < n; ++r) col[r] = ranks[r] / static_cast<double>(n - 1);
        break;
      }
      case Normalization::none:
        break;
    }
    for (std::size_t r = 0; r < n; ++r) out[r * k + c] = col[r];
  }
  return ScoreMatrix(matrix.comment_ids(), matrix.model_names(), std::move(out));
}

std::vector<RowPair> resolve_pairs(const ScoreMatrix& matrix,
                                   std::span<const corpus::PairJudgment> pairs) {
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) index.emplace(matrix.comment_ids()[r], r);
  const auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw std::out_of_range("unknown comment id '" + id + "'");
    return it->second;
  };
  std::vector<RowPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({lookup(p.less_toxic.id), lookup(p.more_toxic.id)});
  return out;
}

LossAndGradient surrogate_loss(std::span<const double> weights,
                               const ScoreMatrix& matrix,
                               std::span<const RowPair> pairs, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (pairs.empty()) throw std::invalid_argument("surrogate_loss: no pairs");
  const std::size_t k = matrix.cols();
  if (weights.size() != k) {
    throw std::invalid_argument("surrogate_loss: " + std::to_string(weights.size()) +
                                " weights for " + std::to_string(k) + " models");
  }
  LossAndGradient out{0.0, std::vector<double>(k, 0.0)};
  std::vector<double> diff(k);
  for (const auto& p : pairs) {
    if (p.less >= matrix.rows() || p.more >= matrix.rows()) {
      throw std::out_of_range("surrogate_loss: pair row out of range");
    }
    const auto more = matrix.row(p.more);
    const auto less = matrix.row(p.less);
    double margin = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      diff[c] = more[c] - less[c];
      margin += weights[c] * diff[c];
    }
    const double z = -margin / temperature;
    out.loss += softplus(z);
    const double coef = -sigmoid(z) / temperature;
    for (std::size_t c = 0; c < k; ++c) out.gradient[c] += coef * diff[c];
  }
  const double inv = 1.0 / static_cast<double>(pairs.size());
  out.loss *= inv;
  for (double& g : out.gradient) g *= inv;
  return out;
}

FitReport fit_weights(const ScoreMatrix& matrix,
                      std::span<const corpus::PairJudgment> pairs,
                      Normalization mode, double temperature,
                      const optim::LbfgsConfig& lbfgs) {
  if (matrix.cols() == 0) throw std::invalid_argument("fit_weights: no models");
  if (pairs.empty()) throw std::invalid_argument("fit_weights: no pairs");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");

  const ScoreMatrix normalized = normalize_scores(matrix, mode);
  const std::vector<RowPair> rows = resolve_pairs(normalized, pairs);
  const optim::Objective objective = [&](std::span<const double> w, std::span<double> g) {
    auto lg = surrogate_loss(w, normalized, rows, temperature);
    std::copy(lg.gradient.begin(), lg.gradient.end(), g.begin());
    return lg.loss;
  };

  std::vector<double> w0(matrix.cols(), 1.0 / static_cast<double>(matrix.cols()));
  FitReport report;
  report.initial_loss = surrogate_loss(w0, normalized, rows, temperature).loss;
  report.optim = optim::lbfgs_minimize(objective, w0, lbfgs);
  report.final_loss = report.optim.f_value;
  report.weights.model_names = matrix.model_names();
  report.weights.weights = report.optim.x;
  report.weights.mode = mode;
  report.weights.temperature = temperature;
  return report;
}

std::vector<std::pair<std::string, double>> blend(const ScoreMatrix& matrix,
                                                  const EnsembleWeights& weights) {
  const std::size_t k = matrix.cols();
  if (weights.weights.size() != k) {
    throw std::invalid_argument("blend: " + std::to_string(weights.weights.size()) +
                                " weights for " + std::to_string(k) + " models");
  }
  // Align by name when the weights carry names.
  std::vector<double> w(weights.weights);
  if (!weights.model_names.empty()) {
    if (weights.model_names.size() != k) {
      throw std::invalid_argument("blend: weight names do not match the matrix");
    }
    for (std::size_t c = 0; c < k; ++c) {
      auto it = std::find(weights.model_names.begin(), weights.model_names.end(),
                          matrix.model_names()[c]);
      if (it == weights.model_names.end()) {
        throw std::invalid_argument("blend: no weight for model '" +
                                    matrix.model_names()[c] + "'");
      }
      w[c] = weights.weights[static_cast<std::size_t>(it - weights.model_names.begin())];
    }
  }
  const ScoreMatrix normalized = normalize_scores(matrix, weights.mode);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(matrix.rows());
  for (std::size_t r = 0; r < normalized.rows(); ++r) {
    const auto row = normalized.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += w[c] * row[c];
    out.emplace_back(normalized.comment_ids()[r], s);
  }
  return out;
}

ScoreMatrix load_score_matrix(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  if (table.header.empty() || table.header[0] != "comment_id") {
    throw std::runtime_error(path + ": first column must be 'comment_id'");
  }
  std::vector<std::string> models(table.header.begin() + 1, table.header.end());
  std::vector<std::string> ids;
  std::vector<double> values;
  ids.reserve(table.rows.size());
  values.reserve(table.rows.size() * models.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    ids.push_back(row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) {
      try {
        values.push_back(csv::parse_double(row[c]));
      } catch (const std::exception& e) {
        throw std::runtime_error(path + ": row " + std::to_string(csv::Table::file_row(i)) +
                                 ": " + e.what());
      }
    }
  }
  try {
    return ScoreMatrix(std::move(ids), std::move(models), std::move(values));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_weights(std::ostream& out, const EnsembleWeights& weights) {
  out << "#mode=" << to_string(weights.mode)
      << ",temperature=" << csv::format_double(weights.temperature) << '\n';
  csv::write_record(out, {"model", "weight"});
  for (std::size_t c = 0; c < weights.weights.size(); ++c) {
    csv::write_record(out, {weights.model_names.at(c), csv::format_double(weights.weights[c])});
  }
}

void save_weights(const std::string& path, const EnsembleWeights& weights) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_weights(out, weights);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

EnsembleWeights load_weights(const std::string& path) {
  const std::string content = csv::read_text_file(path);
  if (!content.starts_with("#")) throw std::runtime_error(path + ": missing metadata line");
  const auto eol = content.find('\n');
  std::string meta = content.substr(1, eol == std::string::npos ? std::string::npos : eol - 1);
  if (!meta.empty() && meta.back() == '\r') meta.pop_back();

  EnsembleWeights w;
  bool have_mode = false;
  bool have_temp = false;
  std::size_t start = 0;
  while (start <= meta.size()) {
    const auto comma = meta.find(',', start);
    const std::string item = meta.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::runtime_error(path + ": bad metadata '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "mode") {
      w.mode = parse_normalization(value);
      have_mode = true;
    } else if (key == "temperature") {
      w.temperature = csv::parse_double(value);
      have_temp = true;
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (!have_mode || !have_temp) throw std::runtime_error(path + ": metadata needs mode and temperature");

  const csv::Table table = csv::parse(content, "#");
  const std::size_t model_col = table.require_column("model");
  const std::size_t weight_col = table.require_column("weight");
  for (const auto& row : table.rows) {
    w.model_names.push_back(row[model_col]);
    w.weights.push_back(csv::parse_double(row[weight_col]));
  }
  return w;
}

}  // namespace sevrank::ensemble
