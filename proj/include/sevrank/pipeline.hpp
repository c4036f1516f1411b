#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sevrank/corpus.hpp"
#include "sevrank/features.hpp"
#include "sevrank/regress.hpp"

namespace sevrank {

/// Preprocess -> TF-IDF -> ridge, the trained text scorer.
class SeverityPipeline {
 public:
  SeverityPipeline(features::TfidfModel tfidf, regress::RidgeModel ridge);

  /// Reads `<prefix>.tfidf` and `<prefix>.ridge`.
  static SeverityPipeline load(const std::string& prefix);
  void save(const std::string& prefix) const;

  double score(std::string_view raw_text) const;
  std::vector<double> score_all(std::span<const std::string> raw_texts) const;

  const features::TfidfModel& tfidf() const noexcept { return tfidf_; }
  const regress::RidgeModel& ridge() const noexcept { return ridge_; }

 private:
  features::TfidfModel tfidf_;
  regress::RidgeModel ridge_;
};

struct TrainOptions {
  textproc::PreprocessConfig preprocess;
  features::TfidfConfig tfidf;
  regress::RidgeOptions ridge;
};

struct TrainResult {
  SeverityPipeline pipeline;
  regress::RidgeFit fit;
  double objective = 0.0;
};

/// Throws std::invalid_argument on an empty dataset.
TrainResult train_pipeline(std::span<const corpus::LabeledExample> examples,
                           const TrainOptions& options);

/// Variant that reuses already preprocessed texts.
TrainResult train_pipeline(std::span<const std::string> preprocessed,
                           std::span<const double> targets,
                           const TrainOptions& options);

}  // namespace sevrank
