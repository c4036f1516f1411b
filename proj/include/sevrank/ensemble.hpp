#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sevrank/corpus.hpp"
#include "sevrank/optim.hpp"

namespace sevrank::ensemble {

/// Comments x score sources, row-major.
class ScoreMatrix {
 public:
  /// Throws on duplicate ids or model names, shape mismatch, or non-finite cells.
  ScoreMatrix(std::vector<std::string> comment_ids,
              std::vector<std::string> model_names, std::vector<double> values);

  std::size_t rows() const noexcept { return ids_.size(); }
  std::size_t cols() const noexcept { return models_.size(); }
  const std::vector<std::string>& comment_ids() const noexcept { return ids_; }
  const std::vector<std::string>& model_names() const noexcept { return models_; }
  std::span<const double> values() const noexcept { return values_; }
  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols(), cols());
  }
  std::vector<double> column(std::size_t c) const;
  /// Row index of `id`; throws std::out_of_range naming the id.
  std::size_t row_of(std::string_view id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> models_;
  std::vector<double> values_;
};

enum class Normalization { none, minmax, zscore, rank };

Normalization parse_normalization(std::string_view name);
std::string_view to_string(Normalization mode);

struct EnsembleWeights {
  std::vector<std::string> model_names;
  std::vector<double> weights;
  Normalization mode = Normalization::minmax;
  double temperature = 0.1;
};

/// A judgment resolved to (less toxic row, more toxic row).
struct RowPair {
  std::size_t less;
  std::size_t more;
};

/// Per-column transform. minmax maps a constant column to 0.5; zscore uses
/// the population standard deviation and maps a constant column to 0; rank
/// divides average ranks (0-based, ties averaged) by N - 1, and a single-row
/// column maps to 0.5.
ScoreMatrix normalize_scores(const ScoreMatrix& matrix, Normalization mode);

/// Resolves pair comment ids to matrix rows; throws naming the first unknown id.
std::vector<RowPair> resolve_pairs(const ScoreMatrix& matrix,
                                   std::span<const corpus::PairJudgment> pairs);

struct LossAndGradient {
  double loss;
  std::vector<double> gradient;
};

/// Mean over pairs of log(1 + exp(-margin / temperature)) where
/// margin = w'(s_more - s_less).
LossAndGradient surrogate_loss(std::span<const double> weights,
                               const ScoreMatrix& matrix,
                               std::span<const RowPair> pairs, double temperature);

struct FitReport {
  EnsembleWeights weights;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  optim::OptimResult optim;
};

/// Normalizes, starts from uniform 1/k weights and minimizes the surrogate.
FitReport fit_weights(const ScoreMatrix& matrix,
                      std::span<const corpus::PairJudgment> pairs,
                      Normalization mode, double temperature = 0.1,
                      const optim::LbfgsConfig& lbfgs = {});

/// (id, w's) per row in matrix order, after normalizing with weights.mode.
std::vector<std::pair<std::string, double>> blend(const ScoreMatrix& matrix,
                                                  const EnsembleWeights& weights);

/// CSV: `comment_id,<model_1>,...,<model_k>`.
ScoreMatrix load_score_matrix(const std::string& path);

/// `#mode=<mode>,temperature=<t>` then CSV `model,weight`.
void write_weights(std::ostream& out, const EnsembleWeights& weights);
void save_weights(const std::string& path, const EnsembleWeights& weights);
EnsembleWeights load_weights(const std::string& path);

}  // namespace sevrank::ensemble
