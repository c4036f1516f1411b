#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sevrank/cli.hpp"
#include "sevrank/corpus.hpp"
#include "sevrank/csv.hpp"
#include "sevrank/ensemble.hpp"
#include "test_util.hpp"

using sevrank::testing::slurp;
using sevrank::testing::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result sevrank_run(std::vector<std::string> args) {
  args.insert(args.begin(), "sevrank");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sevrank::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, double> read_scores(const std::string& path) {
  const auto table = sevrank::csv::read_file(path);
  std::map<std::string, double> m;
  for (const auto& row : table.rows) m[row[0]] = sevrank::csv::parse_double(row[1]);
  return m;
}

const char* kLabeled =
    "comment_id,text,score\n"
    "1,you are a wonderful person,0.0\n"
    "2,have a nice day friend,0.0\n"
    "3,thanks for the help,0.05\n"
    "4,you are an idiot,0.6\n"
    "5,shut up you stupid idiot,0.8\n"
    "6,what a stupid comment,0.5\n"
    "7,i will hurt you idiot,0.95\n"
    "8,lovely weather today,0.0\n";

const char* kPairs =
    "less_toxic,more_toxic\n"
    "have a nice day,you stupid idiot\n"
    "thanks friend,shut up idiot\n"
    "lovely person,what a stupid idiot\n";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(sevrank_run({}).code == 2);
  CHECK(sevrank_run({"frobnicate"}).code == 2);
  CHECK(sevrank_run({"train"}).code == 2);
  TempDir d;
  auto in = d.write("r.csv", "comment_id,txt,score\n1,a,0\n");
  CHECK(sevrank_run({"transform", "--kind", "reddit", "--in", in, "--out", d.file("o.csv")}).code == 2);
  CHECK(sevrank_run({"transform", "--kind", "ruddit", "--in", d.file("missing.csv"), "--out",
                     d.file("o.csv")}).code == 2);
  CHECK(sevrank_run({"--help"}).code == 0);
}

TEST_CASE("runtime failures exit with 1") {
  TempDir d;
  auto bad = d.write("r.csv", "comment_id,txt,score\n1,a,oops\n");
  auto r = sevrank_run({"transform", "--kind", "ruddit", "--in", bad, "--out", d.file("o.csv")});
  CHECK(r.code == 1);
  CHECK(r.err.find("row 2") != std::string::npos);
}

TEST_CASE("transform writes normalized scores") {
  TempDir d;
  auto in = d.write("r.csv", "comment_id,txt,score\na,x,-1\nb,y,0\nc,z,1\n");
  auto out = d.file("o.csv");
  auto r = sevrank_run({"transform", "--kind", "ruddit", "--in", in, "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("rows: 3\n", 0) == 0);
  const auto ex = sevrank::corpus::load_labeled(out);
  REQUIRE(ex.size() == 3);
  CHECK(ex[0].score.value() == 0.0);
  CHECK(ex[1].score.value() == 0.5);
  CHECK(ex[2].score.value() == 1.0);

  auto jtc = d.write("j.csv",
                     "id,comment_text,toxic,severe_toxic,obscene,threat,insult,identity_hate\n"
                     "q,hello,1,0,0,0,0,0\n");
  auto jo = d.file("jo.csv");
  REQUIRE(sevrank_run({"transform", "--kind", "jtc", "--in", jtc, "--out", jo}).code == 0);
  CHECK(sevrank::corpus::load_labeled(jo)[0].score.value() == doctest::Approx(4.0 / 44.0));
}

TEST_CASE("train, score and evaluate round trip") {
  TempDir d;
  auto labeled = d.write("l.csv", kLabeled);
  auto comments = d.write("c.csv", "comment_id,text\nk,you idiot\nn,nice day\n");
  auto pairs = d.write("p.csv", kPairs);
  const auto prefix = d.file("model");
  auto t = sevrank_run({"train", "--labeled", labeled, "--out", prefix, "--max-features", "500"});
  REQUIRE(t.code == 0);
  CHECK(t.out.find("examples: 8") != std::string::npos);
  const std::string first = slurp(prefix + ".tfidf") + slurp(prefix + ".ridge");
  REQUIRE(sevrank_run({"train", "--labeled", labeled, "--out", prefix, "--max-features", "500"}).code == 0);
  CHECK(slurp(prefix + ".tfidf") + slurp(prefix + ".ridge") == first);

  auto s = sevrank_run({"score", "--model", prefix, "--comments", comments, "--out", d.file("s.csv")});
  REQUIRE(s.code == 0);
  const auto scores = read_scores(d.file("s.csv"));
  CHECK(scores.at("k") > scores.at("n"));

  auto e = sevrank_run({"evaluate", "--model", prefix, "--pairs", pairs});
  REQUIRE(e.code == 0);
  const auto report = nlohmann::json::parse(e.out);
  CHECK(report["n_pairs"] == 3);
  CHECK(report["accuracy"].get<double>() == 1.0);

  CHECK(sevrank_run({"evaluate", "--pairs", pairs}).code == 2);
  CHECK(sevrank_run({"score", "--model", d.file("nope"), "--comments", comments, "--out",
                     d.file("x.csv")}).code == 1);
}

TEST_CASE("a huge penalty predicts the label mean") {
  TempDir d;
  auto labeled = d.write("l.csv", kLabeled);
  auto comments = d.write("c.csv", "comment_id,text\nk,you idiot\nn,nice day\n");
  const auto prefix = d.file("m");
  REQUIRE(sevrank_run({"train", "--labeled", labeled, "--out", prefix, "--alpha", "1e9"}).code == 0);
  REQUIRE(sevrank_run({"score", "--model", prefix, "--comments", comments, "--out", d.file("s.csv")}).code == 0);
  const double mean = (0.05 + 0.6 + 0.8 + 0.5 + 0.95) / 8.0;
  for (const auto& [id, v] : read_scores(d.file("s.csv"))) CHECK(v == doctest::Approx(mean).epsilon(1e-6));
}

TEST_CASE("evaluate from a scores file") {
  TempDir d;
  auto scores = d.write("s.csv", "comment_id,score\na,0.1\nb,0.5\nc,0.9\nd,0.3\nt,0.5\n");
  auto pairs = d.write("p.csv", "less_toxic,more_toxic\na,b\nb,c\na,c\nb,d\n");
  auto r = sevrank_run({"evaluate", "--scores", scores, "--pairs", pairs, "--top-errors", "2",
                        "--errors-out", d.file("e.csv")});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["accuracy"].get<double>() == 0.75);
  CHECK(slurp(d.file("e.csv")).find("\n1,b,d,0.5,0.3,") != std::string::npos);

  auto tied = d.write("t.csv", "less_toxic,more_toxic\nb,t\na,c\n");
  auto r0 = sevrank_run({"evaluate", "--scores", scores, "--pairs", tied});
  CHECK(nlohmann::json::parse(r0.out)["accuracy"].get<double>() == 0.5);
  auto rh = sevrank_run({"evaluate", "--scores", scores, "--pairs", tied, "--tie-credit", "0.5"});
  CHECK(nlohmann::json::parse(rh.out)["accuracy"].get<double>() == 0.75);

  auto ghost = d.write("g.csv", "less_toxic,more_toxic\na,ghost\n");
  auto rg = sevrank_run({"evaluate", "--scores", scores, "--pairs", ghost});
  CHECK(rg.code == 1);
  CHECK(rg.err.find("ghost") != std::string::npos);
}

TEST_CASE("ensemble learns the sign of each model") {
  TempDir d;
  auto matrix = d.write("m.csv", "comment_id,A,B\nc0,0.1,0.9\nc1,0.4,0.6\nc2,0.5,0.5\nc3,0.9,0.1\n");
  auto pairs = d.write("p.csv", "less_toxic,more_toxic\nc0,c1\nc1,c2\nc2,c3\nc0,c3\n");
  auto r = sevrank_run({"ensemble", "--matrix", matrix, "--pairs", pairs, "--weights-out",
                        d.file("w.csv"), "--blend-out", d.file("b.csv")});
  REQUIRE(r.code == 0);
  const auto w = sevrank::ensemble::load_weights(d.file("w.csv"));
  CHECK(w.weights[0] > 0.0);
  CHECK(w.weights[1] < 0.0);
  CHECK(r.out.find("\"accuracy\":1") != std::string::npos);
  const auto b = read_scores(d.file("b.csv"));
  CHECK(b.at("c3") > b.at("c0"));
  CHECK(sevrank_run({"ensemble", "--matrix", matrix, "--pairs", pairs, "--mode", "softmax"}).code == 2);
  CHECK(sevrank_run({"ensemble", "--matrix", matrix, "--pairs", pairs, "--temperature", "0"}).code == 2);
}

TEST_CASE("search is seeded") {
  TempDir d;
  auto labeled = d.write("l.csv", kLabeled);
  auto pairs = d.write("p.csv", kPairs);
  auto one = sevrank_run({"search", "--labeled", labeled, "--pairs", pairs, "--trials", "1"});
  REQUIRE(one.code == 0);
  CHECK(nlohmann::json::parse(one.out)["trials"] == 1);
  auto a = sevrank_run({"search", "--labeled", labeled, "--pairs", pairs, "--trials", "3",
                        "--seed", "7", "--log", d.file("log.csv")});
  auto b = sevrank_run({"search", "--labeled", labeled, "--pairs", pairs, "--trials", "3",
                        "--seed", "7"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(sevrank::csv::read_file(d.file("log.csv")).rows.size() == 3);
  CHECK(sevrank_run({"search", "--labeled", labeled, "--pairs", pairs, "--trials", "0"}).code == 2);
}

TEST_CASE("explain") {
  TempDir d;
  auto lex = d.write("w.csv", "word,weight\nidiot,1.0\nstupid,0.5\n");
  CHECK(sevrank_run({"explain", "--word-weights", lex, "--text", "  "}).code == 2);
  CHECK(sevrank_run({"explain", "--text", "hi"}).code == 2);
  auto a = sevrank_run({"explain", "--word-weights", lex, "--text", "you stupid idiot",
                        "--html", d.file("e.html")});
  auto b = sevrank_run({"explain", "--word-weights", lex, "--text", "you stupid idiot"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["importances"][0]["word"] == "idiot");
  CHECK(j["importances"][1]["word"] == "stupid");
  CHECK(slurp(d.file("e.html")).find("<span") != std::string::npos);
}
