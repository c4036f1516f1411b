#include "sevrank/pipeline.hpp"

#include <stdexcept>

namespace sevrank {

SeverityPipeline::SeverityPipeline(features::TfidfModel tfidf, regress::RidgeModel ridge)
    : tfidf_(std::move(tfidf)), ridge_(std::move(ridge)) {
  if (tfidf_.size() != ridge_.weights.size()) {
    throw std::invalid_argument("dimension mismatch: vectorizer has " +
                                std::to_string(tfidf_.size()) + " features, regressor has " +
                                std::to_string(ridge_.weights.size()) + " weights");
  }
}

SeverityPipeline SeverityPipeline::load(const std::string& prefix) {
  return SeverityPipeline(features::load_tfidf(prefix + ".tfidf"),
                          regress::load_ridge(prefix + ".ridge"));
}

void SeverityPipeline::save(const std::string& prefix) const {
  features::save_tfidf(prefix + ".tfidf", tfidf_);
  regress::save_ridge(prefix + ".ridge", ridge_);
}

double SeverityPipeline::score(std::string_view raw_text) const {
  const std::string text = textproc::preprocess(raw_text, tfidf_.preprocess_config());
  return regress::predict(ridge_, tfidf_.transform(text));
}

std::vector<double> SeverityPipeline::score_all(std::span<const std::string> raw_texts) const {
  std::vector<double> out;
  out.reserve(raw_texts.size());
  for (const auto& t : raw_texts) out.push_back(score(t));
  return out;
}

TrainResult train_pipeline(std::span<const std::string> preprocessed,
                           std::span<const double> targets,
                           const TrainOptions& options) {
  if (preprocessed.empty()) throw std::invalid_argument("training set is empty");
  features::TfidfModel tfidf =
      features::fit_tfidf(preprocessed, options.tfidf, options.preprocess);
  std::vector<features::SparseVector> X;
  X.reserve(preprocessed.size());
  for (const auto& t : preprocessed) X.push_back(tfidf.transform(t));
  regress::RidgeFit fit = regress::fit_ridge(X, targets, options.ridge);
  const double objective = regress::ridge_objective(fit.model, X, targets);
  regress::RidgeModel model = fit.model;
  return {SeverityPipeline(std::move(tfidf), std::move(model)), std::move(fit), objective};
}

TrainResult train_pipeline(std::span<const corpus::LabeledExample> examples,
                           const TrainOptions& options) {
  if (examples.empty()) throw std::invalid_argument("training set is empty");
  std::vector<std::string> texts;
  std::vector<double> targets;
  texts.reserve(examples.size());
  targets.reserve(examples.size());
  for (const auto& ex : examples) {
    texts.push_back(textproc::preprocess(ex.comment.text, options.preprocess));
    targets.push_back(ex.score.value());
  }
  return train_pipeline(texts, targets, options);
}

}  // namespace sevrank
