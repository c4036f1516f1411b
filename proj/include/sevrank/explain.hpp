#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sevrank::explain {

using Scorer = std::function<double(std::string_view text)>;

struct ExplainConfig {
  int num_samples = 1000;
  int num_features = 10;
  /// Defaults to max(1, 0.75 * sqrt(distinct words)).
  std::optional<double> kernel_width;
  std::uint64_t seed = 42;
  double ridge_alpha = 1.0;
};

struct WordWeight {
  std::string word;
  double weight = 0.0;
};

struct Explanation {
  std::string text;
  std::vector<std::string> tokens;
  /// Sorted by |weight| descending; at most num_features entries.
  std::vector<WordWeight> importances;
  double intercept = 0.0;
  double local_r2 = 1.0;
};

/// Perturbs `text` by dropping words, scores each variant and fits a
/// kernel-weighted ridge model on word-presence indicators. Every occurrence
/// of a word is kept or dropped together. Throws std::invalid_argument for
/// text without words and std::runtime_error when the scorer returns a
/// non-finite value.
Explanation lime_explain(const Scorer& scorer, std::string_view text,
                         const ExplainConfig& config = {});

std::string explanation_json(const Explanation& explanation);
/// One span per token, background alpha proportional to |weight|.
std::string explanation_html(const Explanation& explanation);

}  // namespace sevrank::explain
