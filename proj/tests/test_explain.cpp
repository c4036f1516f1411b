#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "doctest.h"
#include "sevrank/explain.hpp"

using namespace sevrank::explain;

namespace {

bool has_word(std::string_view text, std::string_view word) {
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w)
    if (w == word) return true;
  return false;
}

double weight_of(const Explanation& e, const std::string& word) {
  for (const auto& iw : e.importances)
    if (iw.word == word) return iw.weight;
  return 0.0;
}

}  // namespace

TEST_CASE("a single trigger word dominates") {
  Scorer s = [](std::string_view t) { return has_word(t, "xyz") ? 1.0 : 0.0; };
  auto e = lime_explain(s, "the quick xyz brown fox");
  REQUIRE(!e.importances.empty());
  CHECK(e.importances.front().word == "xyz");
  CHECK(e.importances.front().weight > 0.0);
  for (std::size_t i = 1; i < e.importances.size(); ++i)
    CHECK(e.importances.front().weight >= 5.0 * std::abs(e.importances[i].weight));
}

TEST_CASE("constant scorer gives zero importances") {
  Scorer s = [](std::string_view) { return 0.42; };
  auto e = lime_explain(s, "nothing to see here");
  for (const auto& iw : e.importances) CHECK(iw.weight == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.intercept == doctest::Approx(0.42));
  CHECK(e.local_r2 == 1.0);
}

TEST_CASE("single word text") {
  Scorer s = [](std::string_view t) { return has_word(t, "idiot") ? 0.9 : 0.1; };
  auto e = lime_explain(s, "idiot");
  REQUIRE(e.importances.size() == 1);
  CHECK(e.importances[0].word == "idiot");
  CHECK(e.importances[0].weight > 0.0);
}

TEST_CASE("presence-linear scorers rank words by their coefficient") {
  const std::vector<std::string> words = {"alpha", "bravo", "charlie", "delta", "echo", "fox"};
  for (int c = 0; c < 10; ++c) {
    std::map<std::string, double> coef;
    for (std::size_t i = 0; i < words.size(); ++i)
      coef[words[i]] = 0.1 + 0.15 * static_cast<double>((i + c) % words.size());
    Scorer s = [&](std::string_view t) {
      double v = 0.0;
      for (const auto& [w, k] : coef)
        if (has_word(t, w)) v += k;
      return v;
    };
    ExplainConfig cfg;
    cfg.seed = 100 + c;
    auto e = lime_explain(s, "alpha bravo charlie delta echo fox", cfg);
    REQUIRE(e.importances.size() == words.size());
    for (std::size_t i = 1; i < e.importances.size(); ++i)
      CHECK(coef[e.importances[i - 1].word] > coef[e.importances[i].word]);
  }
}

TEST_CASE("repeated words are one feature") {
  Scorer s = [](std::string_view t) { return has_word(t, "bad") ? 1.0 : 0.0; };
  auto e = lime_explain(s, "bad dog bad");
  CHECK(e.importances.size() == 2);
  CHECK(weight_of(e, "bad") > 0.0);
}

TEST_CASE("config handling") {
  Scorer s = [](std::string_view t) { return static_cast<double>(t.size()); };
  ExplainConfig cfg;
  cfg.num_samples = 200;
  cfg.num_features = 2;
  auto a = lime_explain(s, "one two three four", cfg);
  auto b = lime_explain(s, "one two three four", cfg);
  CHECK(a.importances.size() == 2);
  REQUIRE(a.importances.size() == b.importances.size());
  for (std::size_t i = 0; i < a.importances.size(); ++i) {
    CHECK(a.importances[i].word == b.importances[i].word);
    CHECK(a.importances[i].weight == b.importances[i].weight);
  }
  CHECK_THROWS_AS(lime_explain(s, "   "), std::invalid_argument);
  Scorer nan = [](std::string_view) { return std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(lime_explain(nan, "some words"), std::runtime_error);
}

TEST_CASE("json and html rendering") {
  Explanation e{"you <b>fool</b>", {"you", "<b>fool</b>"}, {{"<b>fool</b>", 0.8}, {"you", -0.1}}, 0.05, 0.9};
  const auto j = explanation_json(e);
  CHECK(j.find("\"importances\"") != std::string::npos);
  CHECK(j.find("\"<b>fool</b>\"") != std::string::npos);
  const auto h = explanation_html(e);
  CHECK(h.find("&lt;b&gt;fool&lt;/b&gt;") != std::string::npos);
  CHECK(h.find("<b>fool") == std::string::npos);
  CHECK(h.find("<span") != std::string::npos);
}
