#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sevrank::corpus {

struct Comment {
  std::string id;
  std::string text;

  bool operator==(const Comment&) const = default;
};

/// A severity in [0, 1]; larger is more toxic.
class SeverityScore {
 public:
  /// Throws std::domain_error outside [0, 1] or for NaN.
  explicit SeverityScore(double value);
  double value() const noexcept { return value_; }
  bool operator==(const SeverityScore&) const = default;

 private:
  double value_;
};

struct LabeledExample {
  Comment comment;
  SeverityScore score;
  std::string source;
};

/// One annotated pair: the rater judged `more_toxic` to be the more harmful.
struct PairJudgment {
  Comment less_toxic;
  Comment more_toxic;
};

struct JtcLabels {
  bool toxic = false;
  bool severe_toxic = false;
  bool obscene = false;
  bool threat = false;
  bool insult = false;
  bool identity_hate = false;
};

/// Fractions of raters who applied each attribute. `sexually_explicit` has no
/// counterpart in the JTC weighting and does not appear here.
struct UnintendedAttributes {
  double toxicity = 0.0;
  double severe_toxicity = 0.0;
  double obscene = 0.0;
  double threat = 0.0;
  double insult = 0.0;
  double identity_attack = 0.0;
};

struct DavidsonCounts {
  unsigned hate = 0;
  unsigned offensive = 0;
  unsigned neither = 0;
};

// Category weights shared by the JTC and Unintended Bias transforms.
inline constexpr double kWeightSevereToxic = 12.0;
inline constexpr double kWeightIdentityHate = 9.0;
inline constexpr double kWeightThreat = 8.0;
inline constexpr double kWeightInsult = 6.0;
inline constexpr double kWeightObscene = 5.0;
inline constexpr double kWeightToxic = 4.0;
inline constexpr double kMaxWeightSum = kWeightSevereToxic + kWeightIdentityHate +
                                        kWeightThreat + kWeightInsult +
                                        kWeightObscene + kWeightToxic;

/// Ruddit offensiveness in [-1, 1] -> (raw + 1) / 2.
SeverityScore transform_ruddit(double raw);
/// Weighted flag sum divided by the maximum attainable sum (44).
SeverityScore transform_jtc(const JtcLabels& labels);
/// JTC weighting applied to fractional attributes.
SeverityScore transform_unintended(const UnintendedAttributes& attrs);
/// (3 hate + 2 offensive + neither) / coders, affinely mapped from [1, 3].
SeverityScore transform_davidson(const DavidsonCounts& counts);
/// Label in {0, 1, 2} -> label / 2.
SeverityScore transform_founta(int label);

/// Thrown by loaders; the message names the file row (header = row 1).
class LoadError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads `comment_id,text`. Ids must be unique.
std::vector<Comment> load_comments(const std::string& path);

/// Reads `less_toxic,more_toxic` raw-text pairs. Synthetic ids are
/// `p<n>_l` / `p<n>_m` where n is the 1-based data row.
std::vector<PairJudgment> load_pairs(const std::string& path);

enum class DatasetKind { ruddit, jtc, unintended, davidson, founta };

DatasetKind parse_dataset_kind(std::string_view name);
std::string_view to_string(DatasetKind kind);

/// Reads a raw dataset export of the given kind and applies its transform.
/// Column names accepted per kind are listed in the README.
std::vector<LabeledExample> load_dataset(const std::string& path,
                                         DatasetKind kind);

/// `comment_id,text,score` with six decimals.
void write_labeled(std::ostream& out, const std::vector<LabeledExample>& examples);
void save_labeled(const std::string& path,
                  const std::vector<LabeledExample>& examples);
std::vector<LabeledExample> load_labeled(const std::string& path);

/// Counts of scores in ten equal-width bins over [0, 1]; 1.0 lands in the last.
std::array<std::size_t, 10> score_histogram(
    const std::vector<LabeledExample>& examples);

}  // namespace sevrank::corpus
