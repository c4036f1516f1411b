#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sevrank/textproc.hpp"

namespace sevrank::features {

/// Sparse real vector with strictly increasing indices and no stored zeros.
class SparseVector {
 public:
  struct Entry {
    std::uint32_t index;
    double value;
    bool operator==(const Entry&) const = default;
  };

  SparseVector() = default;
  explicit SparseVector(std::size_t dim) : dim_(dim) {}
  /// Validates ordering, bounds and drops explicit zeros.
  SparseVector(std::size_t dim, std::vector<Entry> entries);

  std::size_t dim() const noexcept { return dim_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double norm() const;
  double dot(std::span<const double> dense) const;
  /// Value at `index` (0 if absent).
  double at(std::size_t index) const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

struct TfidfConfig {
  int n_min = 3;
  int n_max = 5;
  std::size_t max_features = 30000;
  std::size_t min_df = 1;

  bool operator==(const TfidfConfig&) const = default;
};

/// Fitted char-wb vocabulary. Column indices follow lexicographic (byte)
/// order of the kept grams.
class TfidfModel {
 public:
  TfidfModel(TfidfConfig config, textproc::PreprocessConfig preprocess,
             std::vector<std::string> grams, std::vector<double> idf);
  TfidfModel(const TfidfModel& other);
  TfidfModel& operator=(const TfidfModel& other);
  TfidfModel(TfidfModel&&) noexcept = default;
  TfidfModel& operator=(TfidfModel&&) noexcept = default;

  const TfidfConfig& config() const noexcept { return config_; }
  /// Preprocessing applied by callers before transform(); stored with the
  /// model so scoring reproduces training.
  const textproc::PreprocessConfig& preprocess_config() const noexcept {
    return preprocess_;
  }
  std::size_t size() const noexcept { return grams_.size(); }
  std::span<const std::string> grams() const noexcept { return grams_; }
  std::span<const double> idf() const noexcept { return idf_; }
  /// Column of `gram`, or -1.
  long long column(std::string_view gram) const;

  /// Raw counts x idf, L2-normalized. `text` must already be preprocessed.
  SparseVector transform(std::string_view text) const;

  bool operator==(const TfidfModel& other) const {
    return config_ == other.config_ && preprocess_ == other.preprocess_ &&
           grams_ == other.grams_ && idf_ == other.idf_;
  }

 private:
  TfidfConfig config_;
  textproc::PreprocessConfig preprocess_;
  std::vector<std::string> grams_;
  std::vector<double> idf_;
  // Keys view into grams_; copies rebuild it.
  std::unordered_map<std::string_view, std::uint32_t> index_;
};

/// Throws std::domain_error on an empty corpus. Grams with df < min_df are
/// dropped, then the max_features grams with the highest total count are kept
/// (ties broken lexicographically ascending). idf = ln((1+N)/(1+df)) + 1.
TfidfModel fit_tfidf(std::span<const std::string> corpus,
                     const TfidfConfig& config,
                     const textproc::PreprocessConfig& preprocess = {});

/// `tfidf-v1` text format; doubles are written in shortest round-trip form.
void write_tfidf(std::ostream& out, const TfidfModel& model);
TfidfModel read_tfidf(std::istream& in);
void save_tfidf(const std::string& path, const TfidfModel& model);
TfidfModel load_tfidf(const std::string& path);

}  // namespace sevrank::features
