#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sevrank/csv.hpp"
#include "sevrank/textproc.hpp"
#include "test_util.hpp"

using namespace sevrank::textproc;

namespace {

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "a", "B", " ", "  ", "\t", "\n", "don't", "DON'T", "it's", "http://x.co/a",
      "HTTPS://Y", "www.z.org", "'", "\"", ",", "!", "f***", "you", "You're",
      "\xc3\xa9", "\xe2\x80\x99", "won\xe2\x80\x99t", "\xc2\xa0", "ww", "w.", "h",
      "ttp://", "can't've", "x'", "'y"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> len(0, 12);
  std::string s;
  for (int i = len(rng); i > 0; --i) s += pieces[pick(rng)];
  return s;
}

}  // namespace

TEST_CASE("preprocess examples") {
  CHECK(preprocess("Visit http://x.co now") == "visit now");
  CHECK(preprocess("Don't go") == "do not go");
  CHECK(preprocess("") == "");
  CHECK(preprocess("  many   spaces\there\n") == "many spaces here");
  CHECK(preprocess("see www.example.com/page, ok") == "see ok");
}

TEST_CASE("preprocess flags are independent") {
  PreprocessConfig none{false, false, false, false};
  CHECK(preprocess("Don't http://x", none) == "Don't http://x");
  PreprocessConfig only_contractions{false, false, true, false};
  CHECK(preprocess("Don't", only_contractions) == "do not");
  PreprocessConfig stem_on;
  stem_on.stem = true;
  CHECK(preprocess("Caresses and ponies!", stem_on) == "caress and poni!");
}

TEST_CASE("contraction handling") {
  const auto& table = default_contractions();
  CHECK(table.size() >= 100);
  for (const auto& [k, v] : table) CHECK(v.find('\'') == std::string::npos);
  CHECK(expand_contractions("I can't", table) == "I cannot");
  CHECK(expand_contractions("won\xe2\x80\x99t", table) == "will not");
  CHECK(expand_contractions("'don't'", table) == "'do not'");
  CHECK(expand_contractions("dont", table) == "dont");
}

TEST_CASE("shipped contraction file matches the compiled table") {
  const auto table = load_contractions(std::string(SEVRANK_TEST_DATA) + "/../../data/contractions.csv");
  CHECK(table == default_contractions());
}

TEST_CASE("preprocess is idempotent") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 2000; ++t) {
    const std::string s = random_text(rng);
    const std::string once = preprocess(s);
    CHECK_MESSAGE(preprocess(once) == once, "input: " << s);
  }
}

TEST_CASE("tokenize_words") {
  CHECK(tokenize_words("a  b") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize_words("").empty());
  CHECK(tokenize_words("f*** you!") == std::vector<std::string>{"f***", "you!"});
  CHECK(tokenize_words("x\xc2\xa0y\xe3\x80\x80z") == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("char_wb_ngrams examples") {
  CHECK(sorted(char_wb_ngrams("hi", 3, 3)) == std::vector<std::string>{" hi", "hi "});
  CHECK(sorted(char_wb_ngrams("ab cd", 3, 3)) ==
        std::vector<std::string>{" ab", " cd", "ab ", "cd "});
  CHECK(char_wb_ngrams("", 3, 5).empty());
  CHECK_THROWS_AS(char_wb_ngrams("x", 0, 3), std::domain_error);
  CHECK_THROWS_AS(char_wb_ngrams("x", 4, 3), std::domain_error);
}

TEST_CASE("short words emit the padded word once") {
  // " x " has length 3: one gram at n=3, nothing more for n=4,5.
  CHECK(char_wb_ngrams("x", 3, 5) == std::vector<std::string>{" x "});
  // " ab " (length 4): two trigrams, then the whole word at n=4, stop.
  CHECK(sorted(char_wb_ngrams("ab", 3, 5)) ==
        std::vector<std::string>{" ab", " ab ", "ab "});
  // Length 2 padded word with n=3..3: emitted as a whole.
  CHECK(char_wb_ngrams("", 1, 1).empty());
}

TEST_CASE("n-grams count code points") {
  // "é" is one code point, so " é " is a single trigram.
  CHECK(char_wb_ngrams("\xc3\xa9", 3, 3) == std::vector<std::string>{" \xc3\xa9 "});
}

TEST_CASE("gram count for a single word is L - n + 1") {
  for (int len = 1; len <= 10; ++len) {
    const std::string word(len, 'q');
    const int padded = len + 2;
    for (int n = 1; n <= padded; ++n) {
      const auto grams = char_wb_ngrams(word, n, n);
      CHECK(grams.size() == static_cast<std::size_t>(padded - n + 1));
    }
  }
}

TEST_CASE("no gram spans two words") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 300; ++t) {
    const std::string s = preprocess(random_text(rng));
    for (const auto& g : char_wb_ngrams(s, 1, 6)) {
      const auto inner = g.size() > 2 ? g.substr(1, g.size() - 2) : std::string();
      CHECK(inner.find(' ') == std::string::npos);
    }
  }
}

TEST_CASE("streaming matches materialized grams") {
  std::vector<std::string> streamed;
  for_each_char_wb_ngram("the quick fox", 2, 4,
                         [&](std::string_view g) { streamed.emplace_back(g); });
  CHECK(streamed == char_wb_ngrams("the quick fox", 2, 4));
}

TEST_CASE("porter examples") {
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("sky") == "sky");
  CHECK(porter_stem("hopping!") == "hop!");
}

TEST_CASE("porter reference vocabulary") {
  std::ifstream in(std::string(SEVRANK_TEST_DATA) + "/porter_vocab.tsv");
  REQUIRE(in);
  std::string line;
  int n = 0, mismatches = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    const std::string word = line.substr(0, tab), expected = line.substr(tab + 1);
    const std::string got = porter_stem(word);
    if (got != expected) {
      ++mismatches;
      MESSAGE(word << ": expected " << expected << ", got " << got);
    }
    CHECK(got.size() <= word.size());
    ++n;
  }
  CHECK(n > 1000);
  CHECK(mismatches == 0);
}
