#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sevrank::textproc {

struct PreprocessConfig {
  bool lowercase = true;
  bool strip_urls = true;
  bool expand_contractions = true;
  // Off by default: char-wb n-grams already capture morphology.
  bool stem = false;

  bool operator==(const PreprocessConfig&) const = default;
};

/// Lowercase contraction -> expansion. Keys carry an apostrophe or are
/// otherwise unambiguous; expansions never contain apostrophes.
using ContractionTable = std::map<std::string, std::string, std::less<>>;

/// The table compiled in from data/contractions.csv.
const ContractionTable& default_contractions();
/// Reads a `contraction,expansion` CSV.
ContractionTable load_contractions(const std::string& path);
ContractionTable parse_contractions(std::string_view csv_content);

/// URL removal, contraction expansion, lowercasing, whitespace collapse and
/// trim, then optional per-token Porter stemming, in that order.
std::string preprocess(std::string_view text, const PreprocessConfig& config = {});
std::string preprocess(std::string_view text, const PreprocessConfig& config,
                       const ContractionTable& contractions);

/// Deletes every `http://`, `https://` or `www.` occurrence (case-insensitive)
/// through the next whitespace character.
std::string strip_urls(std::string_view text);
std::string expand_contractions(std::string_view text,
                                const ContractionTable& contractions);
/// ASCII lowercasing; other bytes untouched.
std::string to_lower_ascii(std::string_view text);
/// Runs of Unicode whitespace become one ASCII space; leading and trailing
/// whitespace is removed.
std::string collapse_whitespace(std::string_view text);

/// Splits on Unicode whitespace. Punctuation stays attached to its word.
std::vector<std::string> tokenize_words(std::string_view text);

/// Character n-grams of every whitespace-delimited word padded with one space
/// on each side. Lengths are in Unicode code points. A padded word no longer
/// than n is emitted once as a whole and larger n are skipped for it.
/// Throws std::domain_error unless 1 <= n_min <= n_max.
std::vector<std::string> char_wb_ngrams(std::string_view text, int n_min,
                                        int n_max);

/// Streams the same grams as char_wb_ngrams without materializing them.
/// The view passed to `sink` is only valid during the call.
void for_each_char_wb_ngram(std::string_view text, int n_min, int n_max,
                            const std::function<void(std::string_view)>& sink);

/// Porter (1980) suffix stripping. Operates on each maximal run of ASCII
/// letters (folded to lowercase); other characters pass through unchanged.
std::string porter_stem(std::string_view token);

namespace utf8 {

/// Decodes one code point starting at `pos`, advancing it. Invalid bytes
/// decode as themselves (U+0080..U+00FF range) one byte at a time.
char32_t next(std::string_view s, std::size_t& pos);
bool is_space(char32_t cp);
/// Byte offsets of each code point boundary, including s.size() at the end.
std::vector<std::size_t> boundaries(std::string_view s);

}  // namespace utf8

}  // namespace sevrank::textproc
