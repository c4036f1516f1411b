#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sevrank/eval.hpp"

using namespace sevrank::eval;
using sevrank::corpus::Comment;
using sevrank::corpus::PairJudgment;

namespace {

PairJudgment pair(const std::string& less, const std::string& more) {
  return {{less, "text " + less}, {more, "text " + more}};
}

}  // namespace

TEST_CASE("pairwise accuracy examples") {
  ScoreMap s = {{"a", 0.1}, {"b", 0.5}, {"c", 0.9}, {"d", 0.3}};
  const std::vector<PairJudgment> pairs = {pair("a", "b"), pair("b", "c"), pair("a", "c"),
                                           pair("b", "d")};
  auto r = pairwise_accuracy(s, pairs);
  CHECK(r.accuracy == 0.75);
  CHECK(r.n_pairs == 4);
  CHECK(r.n_correct == 3);
  CHECK(r.n_ties == 0);

  const std::vector<PairJudgment> one = {pair("a", "c")};
  CHECK(pairwise_accuracy(s, one).accuracy == 1.0);
}

TEST_CASE("ties count as incorrect unless credited") {
  ScoreMap s = {{"a", 0.4}, {"b", 0.4}, {"c", 0.9}};
  const std::vector<PairJudgment> pairs = {pair("a", "b"), pair("a", "c")};
  auto r = pairwise_accuracy(s, pairs);
  CHECK(r.accuracy == 0.5);
  CHECK(r.n_ties == 1);
  CHECK(r.n_correct == 1);
  auto half = pairwise_accuracy(s, pairs, 0.5);
  CHECK(half.accuracy == 0.75);
  CHECK(half.n_correct == 1);
}

TEST_CASE("missing id and empty input") {
  ScoreMap s = {{"a", 0.4}};
  const std::vector<PairJudgment> pairs = {pair("a", "ghost")};
  try {
    pairwise_accuracy(s, pairs);
    FAIL("expected out_of_range");
  } catch (const std::out_of_range& e) {
    CHECK(std::string(e.what()).find("ghost") != std::string::npos);
  }
  CHECK_THROWS(pairwise_accuracy(s, std::vector<PairJudgment>{}));
}

TEST_CASE("rank_errors ordering") {
  ScoreMap s = {{"a", 0.9}, {"b", 0.1}, {"c", 0.5}, {"d", 0.45}, {"e", 0.7}, {"f", 0.7}};
  const std::vector<PairJudgment> pairs = {pair("c", "d"), pair("a", "b"), pair("b", "a"),
                                           pair("e", "f")};
  auto errs = rank_errors(s, pairs, 10);
  REQUIRE(errs.size() == 3);
  CHECK(errs[0].pair.less_toxic.id == "a");
  CHECK(errs[0].margin == doctest::Approx(0.8));
  CHECK(errs[1].pair.less_toxic.id == "c");
  CHECK(errs[1].margin == doctest::Approx(0.05));
  CHECK(errs[2].margin == 0.0);
  for (const auto& e : errs) CHECK(e.margin >= 0.0);
  CHECK(rank_errors(s, pairs, 1).size() == 1);
  CHECK_THROWS(rank_errors(s, pairs, 0));
}

TEST_CASE("accuracy agrees with a brute-force recount") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> pick(0, 39);
  std::uniform_int_distribution<int> level(0, 9);
  ScoreMap s;
  for (int i = 0; i < 40; ++i) s["c" + std::to_string(i)] = level(rng) / 10.0;
  std::vector<PairJudgment> pairs;
  std::vector<std::pair<double, double>> raw;
  for (int t = 0; t < 1000; ++t) {
    const auto l = "c" + std::to_string(pick(rng)), m = "c" + std::to_string(pick(rng));
    pairs.push_back(pair(l, m));
    raw.emplace_back(s[l], s[m]);
  }
  const auto oracle = sevrank::oracle::recount(raw);
  const auto r = pairwise_accuracy(s, pairs);
  CHECK(r.n_correct == oracle.correct);
  CHECK(r.n_ties == oracle.ties);
  CHECK(r.accuracy == static_cast<double>(oracle.correct) / 1000.0);

  ScoreMap warped;
  for (const auto& [k, v] : s) warped[k] = std::exp(3.0 * v) - 7.0;
  const auto w = pairwise_accuracy(warped, pairs);
  CHECK(w.n_correct == r.n_correct);
  CHECK(w.n_ties == r.n_ties);
}

TEST_CASE("resolve_by_text uses the first matching comment") {
  const std::vector<Comment> comments = {{"1", "hello"}, {"2", "bad words"}, {"3", "hello"}};
  const std::vector<PairJudgment> pairs = {{{"", "hello"}, {"", "bad words"}}};
  auto resolved = resolve_by_text(pairs, comments);
  CHECK(resolved[0].less_toxic.id == "1");
  CHECK(resolved[0].more_toxic.id == "2");
  const std::vector<PairJudgment> missing = {pairs[0], {{"", "hello"}, {"", "absent"}}};
  try {
    resolve_by_text(missing, comments);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }
}

TEST_CASE("report outputs") {
  EvalReport r{0.75, 4, 3, 0};
  const auto j = report_json(r);
  CHECK(j.find("\"accuracy\":0.75") != std::string::npos);
  CHECK(j.find("\"n_pairs\":4") != std::string::npos);
  CHECK(j.find("\"n_correct\":3") != std::string::npos);
  CHECK(j.find("\"n_ties\":0") != std::string::npos);

  std::vector<RankedError> errs = {{{{"a", "nice, \"ok\""}, {"b", "mean"}}, 0.9, 0.1, 0.8}};
  std::ostringstream out;
  write_errors(out, errs);
  const auto csv = out.str();
  CHECK(csv.rfind("rank,less_text,more_text,score_less,score_more,margin\n", 0) == 0);
  CHECK(csv.find("1,\"nice, \"\"ok\"\"\",mean,") != std::string::npos);
}
