#include "sevrank/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"
#include "sevrank/corpus.hpp"
#include "sevrank/csv.hpp"
#include "sevrank/ensemble.hpp"
#include "sevrank/eval.hpp"
#include "sevrank/explain.hpp"
#include "sevrank/pipeline.hpp"
#include "sevrank/random.hpp"
#include "sevrank/textproc.hpp"

namespace sevrank::cli {

namespace {

using nlohmann::ordered_json;

void require_file(const std::string& path, const char* flag) {
  if (!std::filesystem::is_regular_file(path)) {
    throw UsageError(std::string(flag) + ": no such file '" + path + "'");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  auto out = open_output(path);
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_scores(const std::string& path,
                  const std::vector<std::pair<std::string, double>>& scores) {
  auto out = open_output(path);
  csv::write_record(out, {"comment_id", "score"});
  for (const auto& [id, s] : scores) csv::write_record(out, {id, csv::format_double(s)});
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

eval::ScoreMap load_score_map(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  const std::size_t id_col = table.require_column("comment_id");
  const std::size_t score_col = table.require_column("score");
  eval::ScoreMap scores;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    try {
      if (!scores.emplace(row[id_col], csv::parse_double(row[score_col])).second) {
        throw std::runtime_error("duplicate id '" + row[id_col] + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": row " + std::to_string(csv::Table::file_row(i)) +
                               ": " + e.what());
    }
  }
  return scores;
}

// Pairs carry raw text. With a comments file, texts resolve to comment ids;
// otherwise each cell is taken to be an id already.
std::vector<corpus::PairJudgment> pairs_as_ids(const std::vector<corpus::PairJudgment>& pairs,
                                               const std::string& comments_path) {
  if (!comments_path.empty()) {
    return eval::resolve_by_text(pairs, corpus::load_comments(comments_path));
  }
  std::vector<corpus::PairJudgment> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({{p.less_toxic.text, p.less_toxic.text}, {p.more_toxic.text, p.more_toxic.text}});
  }
  return out;
}

template <typename Has>
void check_pairs_resolvable(const std::vector<corpus::PairJudgment>& pairs, Has has) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (const auto* c : {&pairs[i].less_toxic, &pairs[i].more_toxic}) {
      if (!has(c->id)) {
        throw std::runtime_error("pair row " + std::to_string(i + 1) + ": unresolvable id '" +
                                 c->id + "'");
      }
    }
  }
}

// Scores every pair text with the pipeline, keyed by the synthetic pair ids.
eval::ScoreMap score_pairs(const SeverityPipeline& pipeline,
                           const std::vector<corpus::PairJudgment>& pairs) {
  eval::ScoreMap scores;
  std::unordered_map<std::string, double> cache;
  const auto score = [&](const std::string& text) {
    auto it = cache.find(text);
    if (it != cache.end()) return it->second;
    const double s = pipeline.score(text);
    cache.emplace(text, s);
    return s;
  };
  for (const auto& p : pairs) {
    scores[p.less_toxic.id] = score(p.less_toxic.text);
    scores[p.more_toxic.id] = score(p.more_toxic.text);
  }
  return scores;
}

struct PreprocessFlags {
  bool stem = false;
  bool no_lowercase = false;
  bool no_strip_urls = false;
  bool no_contractions = false;

  void add_to(CLI::App& app) {
    app.add_flag("--stem", stem, "Porter-stem each token");
    app.add_flag("--no-lowercase", no_lowercase, "Keep letter case");
    app.add_flag("--no-strip-urls", no_strip_urls, "Keep hyperlinks");
    app.add_flag("--no-contractions", no_contractions, "Skip contraction expansion");
  }
  textproc::PreprocessConfig config() const {
    textproc::PreprocessConfig c;
    c.stem = stem;
    c.lowercase = !no_lowercase;
    c.strip_urls = !no_strip_urls;
    c.expand_contractions = !no_contractions;
    return c;
  }
};

// ---------------------------------------------------------------- transform

struct TransformArgs {
  std::string kind;
  std::string in;
  std::string out;
};

void cmd_transform(const TransformArgs& a, std::ostream& out) {
  require_file(a.in, "--in");
  const auto examples = corpus::load_dataset(a.in, corpus::parse_dataset_kind(a.kind));
  corpus::save_labeled(a.out, examples);
  out << "rows: " << examples.size() << '\n';
  const auto hist = corpus::score_histogram(examples);
  for (std::size_t b = 0; b < hist.size(); ++b) {
    out << '[' << csv::format_fixed(b / 10.0, 1) << ", " << csv::format_fixed((b + 1) / 10.0, 1)
        << (b + 1 == hist.size() ? "]" : ")") << ' ' << hist[b] << '\n';
  }
}

// -------------------------------------------------------------------- train

struct TrainArgs {
  std::string labeled;
  std::string out;
  int ngram_min = 3;
  int ngram_max = 5;
  std::size_t max_features = 30000;
  std::size_t min_df = 1;
  double alpha = 1.0;
  double tol = 1e-8;
  int max_iter = 1000;
  PreprocessFlags pre;
};

void cmd_train(const TrainArgs& a, std::ostream& out) {
  require_file(a.labeled, "--labeled");
  const auto examples = corpus::load_labeled(a.labeled);
  if (examples.empty()) throw std::runtime_error(a.labeled + ": dataset is empty");
  TrainOptions opt;
  opt.preprocess = a.pre.config();
  opt.tfidf = {a.ngram_min, a.ngram_max, a.max_features, a.min_df};
  opt.ridge = {a.alpha, a.tol, a.max_iter};
  const TrainResult result = train_pipeline(examples, opt);
  result.pipeline.save(a.out);
  out << "examples: " << examples.size() << '\n'
      << "features: " << result.pipeline.tfidf().size() << '\n'
      << "cg_iterations: " << result.fit.iterations << '\n'
      << "converged: " << (result.fit.converged ? "true" : "false") << '\n'
      << "objective: " << csv::format_double(result.objective) << '\n';
}

// -------------------------------------------------------------------- score

struct ScoreArgs {
  std::string model;
  std::string comments;
  std::string out;
};

void cmd_score(const ScoreArgs& a, std::ostream& out) {
  require_file(a.comments, "--comments");
  const SeverityPipeline pipeline = SeverityPipeline::load(a.model);
  const auto comments = corpus::load_comments(a.comments);
  std::vector<std::pair<std::string, double>> scores;
  scores.reserve(comments.size());
  for (const auto& c : comments) scores.emplace_back(c.id, pipeline.score(c.text));
  write_scores(a.out, scores);
  out << "scored: " << scores.size() << '\n';
}

// ----------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string pairs;
  std::string model;
  std::string scores;
  std::string comments;
  std::string tie_credit = "0";
  std::size_t top_errors = 0;
  std::string errors_out;
  std::string report_out;
};

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  if (a.model.empty() == a.scores.empty()) {
    throw UsageError("evaluate: pass exactly one of --model or --scores");
  }
  if (a.top_errors > 0 && a.errors_out.empty()) {
    throw UsageError("evaluate: --top-errors needs --errors-out");
  }
  require_file(a.pairs, "--pairs");
  const auto raw_pairs = corpus::load_pairs(a.pairs);
  std::vector<corpus::PairJudgment> pairs;
  eval::ScoreMap scores;
  if (!a.model.empty()) {
    pairs = raw_pairs;
    scores = score_pairs(SeverityPipeline::load(a.model), pairs);
  } else {
    require_file(a.scores, "--scores");
    scores = load_score_map(a.scores);
    pairs = pairs_as_ids(raw_pairs, a.comments);
    check_pairs_resolvable(pairs, [&](const std::string& id) { return scores.contains(id); });
  }
  const eval::EvalReport report =
      eval::pairwise_accuracy(scores, pairs, csv::parse_double(a.tie_credit));
  const std::string json = eval::report_json(report);
  out << json << '\n';
  if (!a.report_out.empty()) write_text(a.report_out, json + "\n");
  if (a.top_errors > 0) {
    const auto errors = eval::rank_errors(scores, pairs, a.top_errors);
    auto f = open_output(a.errors_out);
    eval::write_errors(f, errors);
  }
}

// ----------------------------------------------------------------- ensemble

struct EnsembleArgs {
  std::string matrix;
  std::string pairs;
  std::string comments;
  std::string mode = "minmax";
  double temperature = 0.1;
  std::string weights_out;
  std::string blend_out;
  int max_iter = 200;
};

void cmd_ensemble(const EnsembleArgs& a, std::ostream& out) {
  if (!(a.temperature > 0.0)) throw UsageError("ensemble: --temperature must be positive");
  require_file(a.matrix, "--matrix");
  require_file(a.pairs, "--pairs");
  const ensemble::ScoreMatrix matrix = ensemble::load_score_matrix(a.matrix);
  const auto pairs = pairs_as_ids(corpus::load_pairs(a.pairs), a.comments);
  optim::LbfgsConfig lbfgs;
  lbfgs.max_iter = a.max_iter;
  const auto report = ensemble::fit_weights(matrix, pairs, ensemble::parse_normalization(a.mode),
                                            a.temperature, lbfgs);
  const auto blended = ensemble::blend(matrix, report.weights);
  if (!a.weights_out.empty()) ensemble::save_weights(a.weights_out, report.weights);
  if (!a.blend_out.empty()) write_scores(a.blend_out, blended);

  eval::ScoreMap scores(blended.begin(), blended.end());
  const auto acc = eval::pairwise_accuracy(scores, pairs);
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    out << "weight " << matrix.model_names()[c] << ' '
        << csv::format_double(report.weights.weights[c]) << '\n';
  }
  out << "surrogate_initial: " << csv::format_double(report.initial_loss) << '\n'
      << "surrogate_final: " << csv::format_double(report.final_loss) << '\n'
      << "lbfgs_iterations: " << report.optim.iterations << '\n'
      << eval::report_json(acc) << '\n';
}

// ------------------------------------------------------------------- search

struct SearchArgs {
  std::string labeled;
  std::string pairs;
  int trials = 20;
  std::uint64_t seed = 0;
  std::string out;
  std::string log;
};

struct Trial {
  int n_min;
  int n_max;
  std::size_t max_features;
  double alpha;
  double accuracy;
};

void cmd_search(const SearchArgs& a, std::ostream& out) {
  if (a.trials < 1) throw UsageError("search: --trials must be >= 1");
  require_file(a.labeled, "--labeled");
  require_file(a.pairs, "--pairs");
  const auto examples = corpus::load_labeled(a.labeled);
  if (examples.empty()) throw std::runtime_error(a.labeled + ": dataset is empty");
  const auto pairs = corpus::load_pairs(a.pairs);
  if (pairs.empty()) throw std::runtime_error(a.pairs + ": no pairs");

  const textproc::PreprocessConfig pre;
  std::vector<std::string> texts;
  std::vector<double> targets;
  for (const auto& ex : examples) {
    texts.push_back(textproc::preprocess(ex.comment.text, pre));
    targets.push_back(ex.score.value());
  }
  std::vector<std::string> pair_texts;
  for (const auto& p : pairs) {
    pair_texts.push_back(textproc::preprocess(p.less_toxic.text, pre));
    pair_texts.push_back(textproc::preprocess(p.more_toxic.text, pre));
  }

  static constexpr std::pair<int, int> kRanges[] = {{2, 4}, {3, 5}, {3, 6}};
  static constexpr std::size_t kMaxFeatures[] = {10000, 30000, 50000};
  const double log_lo = std::log(0.01);
  const double log_hi = std::log(100.0);

  // Vectorized train and pair matrices per (range, cap), built on first use.
  struct Design {
    std::vector<features::SparseVector> train;
    std::vector<features::SparseVector> pairs;
  };
  std::map<std::tuple<int, int, std::size_t>, Design> designs;

  Rng rng(a.seed);
  std::vector<Trial> trials;
  for (int t = 0; t < a.trials; ++t) {
    const auto [n_min, n_max] = kRanges[rng.below(3)];
    const std::size_t cap = kMaxFeatures[rng.below(3)];
    const double alpha = std::exp(log_lo + rng.uniform() * (log_hi - log_lo));

    auto key = std::make_tuple(n_min, n_max, cap);
    auto it = designs.find(key);
    if (it == designs.end()) {
      const auto tfidf = features::fit_tfidf(texts, {n_min, n_max, cap, 1}, pre);
      Design d;
      for (const auto& s : texts) d.train.push_back(tfidf.transform(s));
      for (const auto& s : pair_texts) d.pairs.push_back(tfidf.transform(s));
      it = designs.emplace(key, std::move(d)).first;
    }
    const Design& d = it->second;
    const auto fit = regress::fit_ridge(d.train, targets, {alpha, 1e-8, 1000});
    eval::ScoreMap scores;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      scores[pairs[i].less_toxic.id] = regress::predict(fit.model, d.pairs[2 * i]);
      scores[pairs[i].more_toxic.id] = regress::predict(fit.model, d.pairs[2 * i + 1]);
    }
    trials.push_back({n_min, n_max, cap, alpha, eval::pairwise_accuracy(scores, pairs).accuracy});
  }

  // First trial wins ties.
  std::size_t best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i) {
    if (trials[i].accuracy > trials[best].accuracy) best = i;
  }
  const auto to_json = [](const Trial& t) {
    return ordered_json{{"n_min", t.n_min}, {"n_max", t.n_max}, {"max_features", t.max_features},
                        {"alpha", t.alpha}, {"accuracy", t.accuracy}};
  };
  ordered_json result;
  result["seed"] = a.seed;
  result["trials"] = trials.size();
  result["best"] = to_json(trials[best]);
  const std::string json = result.dump(2);
  out << json << '\n';
  if (!a.out.empty()) write_text(a.out, json + "\n");
  if (!a.log.empty()) {
    auto f = open_output(a.log);
    csv::write_record(f, {"trial", "n_min", "n_max", "max_features", "alpha", "accuracy"});
    for (std::size_t i = 0; i < trials.size(); ++i) {
      const auto& t = trials[i];
      csv::write_record(f, {std::to_string(i + 1), std::to_string(t.n_min), std::to_string(t.n_max),
                            std::to_string(t.max_features), csv::format_double(t.alpha),
                            csv::format_double(t.accuracy)});
    }
  }
}

// ------------------------------------------------------------------ explain

struct ExplainArgs {
  std::string model;
  std::string word_weights;
  std::string text;
  int num_samples = 1000;
  int num_features = 10;
  double kernel_width = 0.0;
  std::string out;
  std::string html;
};

// Presence-linear scorer: sum of the weights of listed words present in the text.
explain::Scorer lexicon_scorer(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  const std::size_t word_col = table.require_column("word");
  const std::size_t weight_col = table.require_column("weight");
  auto lexicon = std::make_shared<std::unordered_map<std::string, double>>();
  for (const auto& row : table.rows) (*lexicon)[row[word_col]] = csv::parse_double(row[weight_col]);
  return [lexicon](std::string_view text) {
    double s = 0.0;
    std::unordered_map<std::string, bool> seen;
    for (const auto& w : textproc::tokenize_words(text)) {
      if (auto it = lexicon->find(w); it != lexicon->end() && !seen[w]) {
        seen[w] = true;
        s += it->second;
      }
    }
    return s;
  };
}

void cmd_explain(const ExplainArgs& a, std::uint64_t seed, std::ostream& out) {
  if (a.model.empty() == a.word_weights.empty()) {
    throw UsageError("explain: pass exactly one of --model or --word-weights");
  }
  if (textproc::tokenize_words(a.text).empty()) throw UsageError("explain: --text is empty");
  explain::Scorer scorer;
  std::optional<SeverityPipeline> pipeline;
  if (!a.model.empty()) {
    pipeline.emplace(SeverityPipeline::load(a.model));
    scorer = [&pipeline](std::string_view t) { return pipeline->score(t); };
  } else {
    require_file(a.word_weights, "--word-weights");
    scorer = lexicon_scorer(a.word_weights);
  }
  explain::ExplainConfig config;
  config.num_samples = a.num_samples;
  config.num_features = a.num_features;
  config.seed = seed;
  if (a.kernel_width > 0.0) config.kernel_width = a.kernel_width;
  const auto ex = explain::lime_explain(scorer, a.text, config);
  const std::string json = explain::explanation_json(ex);
  out << json << '\n';
  if (!a.out.empty()) write_text(a.out, json + "\n");
  if (!a.html.empty()) write_text(a.html, explain::explanation_html(ex));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toxicity severity scoring toolkit", "sevrank"};
  app.require_subcommand(1);
  std::uint64_t seed = 42;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
  };

  TransformArgs ta;
  auto* transform = app.add_subcommand("transform", "Map a raw dataset export to severity scores");
  transform->add_option("--kind", ta.kind, "Dataset kind")
      ->required()
      ->check(CLI::IsMember({"ruddit", "jtc", "unintended", "davidson", "founta"}));
  transform->add_option("--in", ta.in, "Input CSV")->required();
  transform->add_option("--out", ta.out, "Output labeled CSV")->required();
  add_seed(transform);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Fit TF-IDF + ridge on a labeled CSV");
  train->add_option("--labeled", tr.labeled, "labeled.csv")->required();
  train->add_option("--out", tr.out, "Model prefix (writes PREFIX.tfidf, PREFIX.ridge)")->required();
  train->add_option("--ngram-min", tr.ngram_min)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--ngram-max", tr.ngram_max)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--max-features", tr.max_features)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--min-df", tr.min_df)->capture_default_str();
  train->add_option("--alpha", tr.alpha, "Ridge penalty")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--tol", tr.tol, "CG relative tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--max-iter", tr.max_iter, "CG iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  tr.pre.add_to(*train);
  add_seed(train);

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "Score a comments CSV with a trained model");
  score->add_option("--model", sa.model, "Model prefix")->required();
  score->add_option("--comments", sa.comments, "comments.csv")->required();
  score->add_option("--out", sa.out, "Output scores CSV")->required();
  add_seed(score);

  EvaluateArgs ea;
  auto* evaluate = app.add_subcommand("evaluate", "Pairwise agreement against judgments");
  evaluate->add_option("--pairs", ea.pairs, "pairs.csv")->required();
  evaluate->add_option("--model", ea.model, "Model prefix");
  evaluate->add_option("--scores", ea.scores, "Scores CSV (comment_id,score)");
  evaluate->add_option("--comments", ea.comments, "comments.csv used to resolve pair texts to ids");
  evaluate->add_option("--tie-credit", ea.tie_credit)->capture_default_str()->check(CLI::IsMember({"0", "0.5"}));
  evaluate->add_option("--top-errors", ea.top_errors, "Write the k worst errors");
  evaluate->add_option("--errors-out", ea.errors_out, "Error listing CSV");
  evaluate->add_option("--report-out", ea.report_out, "Also write the report JSON here");
  add_seed(evaluate);

  EnsembleArgs na;
  auto* ens = app.add_subcommand("ensemble", "Fit blend weights with L-BFGS and blend");
  ens->add_option("--matrix", na.matrix, "Score matrix CSV")->required();
  ens->add_option("--pairs", na.pairs, "pairs.csv")->required();
  ens->add_option("--comments", na.comments, "comments.csv used to resolve pair texts to ids");
  ens->add_option("--mode", na.mode)->capture_default_str()->check(CLI::IsMember({"none", "minmax", "zscore", "rank"}));
  ens->add_option("--temperature", na.temperature)->capture_default_str();
  ens->add_option("--max-iter", na.max_iter, "L-BFGS iteration cap")->capture_default_str();
  ens->add_option("--weights-out", na.weights_out, "Weights CSV");
  ens->add_option("--blend-out", na.blend_out, "Blended scores CSV");
  add_seed(ens);

  SearchArgs ra;
  auto* search = app.add_subcommand("search", "Random hyperparameter search for TF-IDF + ridge");
  search->add_option("--labeled", ra.labeled, "labeled.csv")->required();
  search->add_option("--pairs", ra.pairs, "pairs.csv")->required();
  search->add_option("--trials", ra.trials)->capture_default_str();
  search->add_option("--out", ra.out, "Best-config JSON");
  search->add_option("--log", ra.log, "Per-trial CSV log");
  add_seed(search);

  ExplainArgs xa;
  auto* expl = app.add_subcommand("explain", "Word-level local explanation of one comment");
  expl->add_option("--model", xa.model, "Model prefix");
  expl->add_option("--word-weights", xa.word_weights, "CSV word,weight lexicon scorer");
  expl->add_option("--text", xa.text, "Comment to explain")->required();
  expl->add_option("--num-samples", xa.num_samples)->capture_default_str();
  expl->add_option("--num-features", xa.num_features)->capture_default_str();
  expl->add_option("--kernel-width", xa.kernel_width, "Default: max(1, 0.75 sqrt(words))");
  expl->add_option("--out", xa.out, "Explanation JSON");
  expl->add_option("--html", xa.html, "Highlighted HTML snippet");
  add_seed(expl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*transform) cmd_transform(ta, out);
    else if (*train) cmd_train(tr, out);
    else if (*score) cmd_score(sa, out);
    else if (*evaluate) cmd_evaluate(ea, out);
    else if (*ens) cmd_ensemble(na, out);
    else if (*search) {
      ra.seed = seed;
      cmd_search(ra, out);
    } else if (*expl) cmd_explain(xa, seed, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace sevrank::cli
