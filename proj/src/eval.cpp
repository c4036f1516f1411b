#include "sevrank/eval.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "sevrank/csv.hpp"

namespace sevrank::eval {

namespace {

double lookup(const ScoreMap& scores, const std::string& id) {
  auto it = scores.find(id);
  if (it == scores.end()) throw std::out_of_range("no score for id '" + id + "'");
  return it->second;
}

}  // namespace

EvalReport pairwise_accuracy(const ScoreMap& scores,
                             std::span<const corpus::PairJudgment> pairs,
                             double tie_credit) {
  if (tie_credit != 0.0 && tie_credit != 0.5) {
    throw std::invalid_argument("tie credit must be 0 or 0.5");
  }
  if (pairs.empty()) throw std::invalid_argument("pairwise_accuracy: no pairs");
  EvalReport report;
  report.n_pairs = pairs.size();
  for (const auto& p : pairs) {
    const double less = lookup(scores, p.less_toxic.id);
    const double more = lookup(scores, p.more_toxic.id);
    if (more > less) {
      ++report.n_correct;
    } else if (more == less) {
      ++report.n_ties;
    }
  }
  report.accuracy = (static_cast<double>(report.n_correct) +
                     tie_credit * static_cast<double>(report.n_ties)) /
                    static_cast<double>(report.n_pairs);
  return report;
}

std::vector<RankedError> rank_errors(const ScoreMap& scores,
                                     std::span<const corpus::PairJudgment> pairs,
                                     std::size_t k) {
  if (k < 1) throw std::invalid_argument("rank_errors: k must be >= 1");
  std::vector<RankedError> errors;
  for (const auto& p : pairs) {
    const double less = lookup(scores, p.less_toxic.id);
    const double more = lookup(scores, p.more_toxic.id);
    const double margin = less - more;
    if (margin >= 0.0) errors.push_back({p, less, more, margin});
  }
  std::stable_sort(errors.begin(), errors.end(),
                   [](const RankedError& a, const RankedError& b) { return a.margin > b.margin; });
  if (errors.size() > k) errors.resize(k);
  return errors;
}

std::vector<corpus::PairJudgment> resolve_by_text(
    std::span<const corpus::PairJudgment> pairs,
    std::span<const corpus::Comment> comments) {
  std::unordered_map<std::string_view, std::string_view> by_text;
  by_text.reserve(comments.size());
  for (const auto& c : comments) by_text.emplace(c.text, c.id);  // first wins
  std::vector<corpus::PairJudgment> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto resolve = [&](const corpus::Comment& c) {
      auto it = by_text.find(c.text);
      if (it == by_text.end()) {
        throw std::out_of_range("pair row " + std::to_string(i + 1) +
                                ": no comment with text \"" + c.text + "\"");
      }
      return corpus::Comment{std::string(it->second), c.text};
    };
    out.push_back({resolve(pairs[i].less_toxic), resolve(pairs[i].more_toxic)});
  }
  return out;
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["accuracy"] = report.accuracy;
  j["n_pairs"] = report.n_pairs;
  j["n_correct"] = report.n_correct;
  j["n_ties"] = report.n_ties;
  return j.dump();
}

void write_errors(std::ostream& out, std::span<const RankedError> errors) {
  csv::write_record(out, {"rank", "less_text", "more_text", "score_less", "score_more", "margin"});
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const auto& e = errors[i];
    csv::write_record(out, {std::to_string(i + 1), e.pair.less_toxic.text,
                            e.pair.more_toxic.text, csv::format_double(e.score_less),
                            csv::format_double(e.score_more), csv::format_double(e.margin)});
  }
}

}  // namespace sevrank::eval
