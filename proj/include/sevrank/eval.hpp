#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sevrank/corpus.hpp"

namespace sevrank::eval {

using ScoreMap = std::unordered_map<std::string, double>;

struct EvalReport {
  double accuracy = 0.0;
  std::size_t n_pairs = 0;
  std::size_t n_correct = 0;
  /// Tied pairs; counted as incorrect.
  std::size_t n_ties = 0;
};

struct RankedError {
  corpus::PairJudgment pair;
  double score_less = 0.0;
  double score_more = 0.0;
  /// score_less - score_more; never negative for a reported error.
  double margin = 0.0;
};

/// A pair is correct iff score(more) > score(less). Ties add `tie_credit`
/// (0 or 0.5) to the accuracy numerator but never to n_correct.
/// Throws std::out_of_range naming a missing id.
EvalReport pairwise_accuracy(const ScoreMap& scores,
                             std::span<const corpus::PairJudgment> pairs,
                             double tie_credit = 0.0);

/// Wrong or tied pairs sorted by margin descending (stable), first k kept.
std::vector<RankedError> rank_errors(const ScoreMap& scores,
                                     std::span<const corpus::PairJudgment> pairs,
                                     std::size_t k);

/// Rewrites pair ids to the id of the first comment with identical text.
/// Throws naming the 1-based pair row when a text is not found.
std::vector<corpus::PairJudgment> resolve_by_text(
    std::span<const corpus::PairJudgment> pairs,
    std::span<const corpus::Comment> comments);

/// {"accuracy":..,"n_pairs":..,"n_correct":..,"n_ties":..}
std::string report_json(const EvalReport& report);
/// `rank,less_text,more_text,score_less,score_more,margin`.
void write_errors(std::ostream& out, std::span<const RankedError> errors);

}  // namespace sevrank::eval
