#include "sevrank/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sevrank/csv.hpp"

namespace sevrank::features {

SparseVector::SparseVector(std::size_t dim, std::vector<Entry> entries)
    : dim_(dim) {
  entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.index >= dim) {
      throw std::out_of_range("sparse index " + std::to_string(e.index) +
                              " >= dim " + std::to_string(dim));
    }
    if (!entries_.empty() && e.index <= entries_.back().index) {
      throw std::invalid_argument("sparse indices must be strictly increasing");
    }
    if (e.value != 0.0) entries_.push_back(e);
  }
}

double SparseVector::norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value * e.value;
  return std::sqrt(sum);
}

double SparseVector::dot(std::span<const double> dense) const {
  if (dense.size() != dim_) {
    throw std::invalid_argument("dimension mismatch: vector dim " +
                                std::to_string(dim_) + ", dense length " +
                                std::to_string(dense.size()));
  }
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value * dense[e.index];
  return sum;
}

double SparseVector::at(std::size_t index) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const Entry& e, std::size_t i) { return e.index < i; });
  return it != entries_.end() && it->index == index ? it->value : 0.0;
}

TfidfModel::TfidfModel(TfidfConfig config, textproc::PreprocessConfig preprocess,
                       std::vector<std::string> grams, std::vector<double> idf)
    : config_(config),
      preprocess_(preprocess),
      grams_(std::move(grams)),
      idf_(std::move(idf)) {
  if (grams_.size() != idf_.size()) {
    throw std::invalid_argument("tfidf: gram and idf counts differ");
  }
  if (grams_.size() > config_.max_features) {
    throw std::invalid_argument("tfidf: vocabulary exceeds max_features");
  }
  index_.reserve(grams_.size());
  for (std::size_t i = 0; i < grams_.size(); ++i) {
    if (i > 0 && !(grams_[i - 1] < grams_[i])) {
      throw std::invalid_argument("tfidf: vocabulary must be strictly sorted");
    }
    if (!(idf_[i] >= 1.0) || !std::isfinite(idf_[i])) {
      throw std::invalid_argument("tfidf: idf must be finite and >= 1");
    }
    index_.emplace(grams_[i], static_cast<std::uint32_t>(i));
  }
}

TfidfModel::TfidfModel(const TfidfModel& other)
    : TfidfModel(other.config_, other.preprocess_, other.grams_, other.idf_) {}

TfidfModel& TfidfModel::operator=(const TfidfModel& other) {
  if (this != &other) *this = TfidfModel(other);
  return *this;
}

long long TfidfModel::column(std::string_view gram) const {
  auto it = index_.find(gram);
  return it == index_.end() ? -1 : static_cast<long long>(it->second);
}

SparseVector TfidfModel::transform(std::string_view text) const {
  std::map<std::uint32_t, double> counts;
  textproc::for_each_char_wb_ngram(
      text, config_.n_min, config_.n_max, [&](std::string_view g) {
        if (auto it = index_.find(g); it != index_.end()) counts[it->second] += 1.0;
      });
  std::vector<SparseVector::Entry> entries;
  entries.reserve(counts.size());
  double sq = 0.0;
  for (const auto& [col, count] : counts) {
    const double v = count * idf_[col];
    entries.push_back({col, v});
    sq += v * v;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : entries) e.value *= inv;
  }
  return SparseVector(grams_.size(), std::move(entries));
}

TfidfModel fit_tfidf(std::span<const std::string> corpus,
                     const TfidfConfig& config,
                     const textproc::PreprocessConfig& preprocess) {
  if (corpus.empty()) throw std::domain_error("fit_tfidf: empty corpus");
  if (config.max_features == 0) {
    throw std::domain_error("fit_tfidf: max_features must be positive");
  }

  struct Stats {
    std::uint64_t count = 0;
    std::uint64_t df = 0;
    std::size_t last_doc = static_cast<std::size_t>(-1);
  };
  std::unordered_map<std::string, Stats> stats;
  std::string key;
  for (std::size_t doc = 0; doc < corpus.size(); ++doc) {
    textproc::for_each_char_wb_ngram(
        corpus[doc], config.n_min, config.n_max, [&](std::string_view g) {
          key.assign(g);
          Stats& s = stats[key];
          ++s.count;
          if (s.last_doc != doc) {
            s.last_doc = doc;
            ++s.df;
          }
        });
  }

  struct Candidate {
    const std::string* gram;
    std::uint64_t count;
    std::uint64_t df;
  };
  std::vector<Candidate> kept;
  kept.reserve(stats.size());
  for (const auto& [gram, s] : stats) {
    if (s.df >= config.min_df) kept.push_back({&gram, s.count, s.df});
  }
  const auto by_frequency = [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count > b.count;
    return *a.gram < *b.gram;
  };
  if (kept.size() > config.max_features) {
    std::nth_element(kept.begin(), kept.begin() + config.max_features,
                     kept.end(), by_frequency);
    kept.resize(config.max_features);
  }
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    return *a.gram < *b.gram;
  });

  const double n_docs = static_cast<double>(corpus.size());
  std::vector<std::string> grams;
  std::vector<double> idf;
  grams.reserve(kept.size());
  idf.reserve(kept.size());
  for (const auto& c : kept) {
    grams.push_back(*c.gram);
    idf.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(c.df))) + 1.0);
  }
  return TfidfModel(config, preprocess, std::move(grams), std::move(idf));
}

namespace {

constexpr std::string_view kTfidfMagic = "tfidf-v1";

std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace

void write_tfidf(std::ostream& out, const TfidfModel& model) {
  const auto& c = model.config();
  const auto& p = model.preprocess_config();
  out << kTfidfMagic << '\n'
      << "n_min=" << c.n_min << " n_max=" << c.n_max
      << " max_features=" << c.max_features << " min_df=" << c.min_df
      << " lowercase=" << flag(p.lowercase) << " strip_urls=" << flag(p.strip_urls)
      << " expand_contractions=" << flag(p.expand_contractions)
      << " stem=" << flag(p.stem) << " size=" << model.size() << '\n';
  const auto grams = model.grams();
  const auto idf = model.idf();
  for (std::size_t i = 0; i < grams.size(); ++i) {
    out << grams[i] << '\t' << i << '\t' << csv::format_double(idf[i]) << '\n';
  }
}

TfidfModel read_tfidf(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTfidfMagic) {
    throw std::runtime_error("not a tfidf-v1 model");
  }
  if (!std::getline(in, line)) throw std::runtime_error("tfidf: missing config line");

  std::map<std::string, long long, std::less<>> kv;
  std::istringstream fields(line);
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::runtime_error("tfidf: bad config field '" + field + "'");
    kv[field.substr(0, eq)] = csv::parse_int(std::string_view(field).substr(eq + 1));
  }
  const auto get = [&](const char* name) {
    auto it = kv.find(name);
    if (it == kv.end()) throw std::runtime_error(std::string("tfidf: missing ") + name);
    return it->second;
  };
  TfidfConfig config;
  config.n_min = static_cast<int>(get("n_min"));
  config.n_max = static_cast<int>(get("n_max"));
  config.max_features = static_cast<std::size_t>(get("max_features"));
  config.min_df = static_cast<std::size_t>(get("min_df"));
  textproc::PreprocessConfig pre;
  pre.lowercase = get("lowercase") != 0;
  pre.strip_urls = get("strip_urls") != 0;
  pre.expand_contractions = get("expand_contractions") != 0;
  pre.stem = get("stem") != 0;
  const auto size = static_cast<std::size_t>(get("size"));

  std::vector<std::string> grams;
  std::vector<double> idf;
  grams.reserve(size);
  idf.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("tfidf: truncated vocabulary");
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw std::runtime_error("tfidf: malformed entry " + std::to_string(i));
    }
    if (csv::parse_int(std::string_view(line).substr(t1 + 1, t2 - t1 - 1)) !=
        static_cast<long long>(i)) {
      throw std::runtime_error("tfidf: column indices must be 0..size-1 in order");
    }
    grams.push_back(line.substr(0, t1));
    idf.push_back(csv::parse_double(std::string_view(line).substr(t2 + 1)));
  }
  if (std::getline(in, line) && !line.empty()) {
    throw std::runtime_error("tfidf: trailing data after vocabulary");
  }
  return TfidfModel(config, pre, std::move(grams), std::move(idf));
}

void save_tfidf(const std::string& path, const TfidfModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_tfidf(out, model);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

TfidfModel load_tfidf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return read_tfidf(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace sevrank::features
