#include "sevrank/corpus.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "sevrank/csv.hpp"

namespace sevrank::corpus {

namespace {

std::string at_row(const std::string& path, std::size_t row,
                   const std::string& what) {
  return path + ": row " + std::to_string(row) + ": " + what;
}

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in [0,1], got " +
                            csv::format_double(v));
  }
}

csv::Table read_table(const std::string& path) {
  try {
    return csv::read_file(path);
  } catch (const csv::CsvError& e) {
    throw LoadError(e.what());
  }
}

std::size_t column(const csv::Table& table, const std::string& path,
                   std::initializer_list<std::string_view> names) {
  try {
    return table.require_column(names);
  } catch (const csv::CsvError& e) {
    throw LoadError(path + ": " + e.what());
  }
}

class IdRegistry {
 public:
  explicit IdRegistry(const std::string& path) : path_(path) {}
  void add(const std::string& id, std::size_t row) {
    auto [it, inserted] = seen_.emplace(id, row);
    if (!inserted) {
      throw LoadError(at_row(path_, row,
                             "duplicate id '" + id + "' (first seen on row " +
                                 std::to_string(it->second) + ")"));
    }
  }

 private:
  const std::string& path_;
  std::unordered_map<std::string, std::size_t> seen_;
};

bool parse_flag(const std::string& cell) {
  const double v = csv::parse_double(cell);
  if (v == 0.0) return false;
  if (v == 1.0) return true;
  throw std::domain_error("flag must be 0 or 1, got '" + cell + "'");
}

}  // namespace

SeverityScore::SeverityScore(double value) : value_(value) {
  check_unit_interval(value, "severity score");
}

SeverityScore transform_ruddit(double raw) {
  if (!(raw >= -1.0 && raw <= 1.0)) {
    throw std::domain_error("ruddit score must lie in [-1,1], got " +
                            csv::format_double(raw));
  }
  return SeverityScore((raw + 1.0) / 2.0);
}

SeverityScore transform_jtc(const JtcLabels& labels) {
  double sum = 0.0;
  if (labels.severe_toxic) sum += kWeightSevereToxic;
  if (labels.identity_hate) sum += kWeightIdentityHate;
  if (labels.threat) sum += kWeightThreat;
  if (labels.insult) sum += kWeightInsult;
  if (labels.obscene) sum += kWeightObscene;
  if (labels.toxic) sum += kWeightToxic;
  return SeverityScore(sum / kMaxWeightSum);
}

SeverityScore transform_unintended(const UnintendedAttributes& a) {
  check_unit_interval(a.toxicity, "toxicity");
  check_unit_interval(a.severe_toxicity, "severe_toxicity");
  check_unit_interval(a.obscene, "obscene");
  check_unit_interval(a.threat, "threat");
  check_unit_interval(a.insult, "insult");
  check_unit_interval(a.identity_attack, "identity_attack");
  const double sum = kWeightSevereToxic * a.severe_toxicity +
                     kWeightIdentityHate * a.identity_attack +
                     kWeightThreat * a.threat + kWeightInsult * a.insult +
                     kWeightObscene * a.obscene + kWeightToxic * a.toxicity;
  // Rounding can push an all-ones sum a hair past the maximum.
  return SeverityScore(std::min(1.0, sum / kMaxWeightSum));
}

SeverityScore transform_davidson(const DavidsonCounts& c) {
  const unsigned total = c.hate + c.offensive + c.neither;
  if (total == 0) throw std::domain_error("davidson row has zero coders");
  const double raw = (3.0 * c.hate + 2.0 * c.offensive + 1.0 * c.neither) /
                     static_cast<double>(total);
  return SeverityScore((raw - 1.0) / 2.0);
}

SeverityScore transform_founta(int label) {
  if (label < 0 || label > 2) {
    throw std::domain_error("founta label must be 0, 1 or 2, got " +
                            std::to_string(label));
  }
  return SeverityScore(label / 2.0);
}

std::vector<Comment> load_comments(const std::string& path) {
  const csv::Table table = read_table(path);
  const std::size_t id_col = column(table, path, {"comment_id"});
  const std::size_t text_col = column(table, path, {"text"});
  IdRegistry ids(path);
  std::vector<Comment> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    ids.add(row[id_col], csv::Table::file_row(i));
    out.push_back({row[id_col], row[text_col]});
  }
  return out;
}

std::vector<PairJudgment> load_pairs(const std::string& path) {
  const csv::Table table = read_table(path);
  const std::size_t less_col = column(table, path, {"less_toxic"});
  const std::size_t more_col = column(table, path, {"more_toxic"});
  std::vector<PairJudgment> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string stem = "p" + std::to_string(i + 1);
    out.push_back({{stem + "_l", table.rows[i][less_col]},
                   {stem + "_m", table.rows[i][more_col]}});
  }
  return out;
}

DatasetKind parse_dataset_kind(std::string_view name) {
  if (name == "ruddit") return DatasetKind::ruddit;
  if (name == "jtc") return DatasetKind::jtc;
  if (name == "unintended") return DatasetKind::unintended;
  if (name == "davidson") return DatasetKind::davidson;
  if (name == "founta") return DatasetKind::founta;
  throw std::invalid_argument("unknown dataset kind '" + std::string(name) + "'");
}

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::ruddit: return "ruddit";
    case DatasetKind::jtc: return "jtc";
    case DatasetKind::unintended: return "unintended";
    case DatasetKind::davidson: return "davidson";
    case DatasetKind::founta: return "founta";
  }
  return "unknown";
}

std::vector<LabeledExample> load_dataset(const std::string& path,
                                         DatasetKind kind) {
  const csv::Table table = read_table(path);
  const std::optional<std::size_t> id_col =
      table.find_column({"comment_id", "id"});
  std::size_t text_col = 0;
  switch (kind) {
    case DatasetKind::ruddit:
      text_col = column(table, path, {"text", "body", "txt"});
      break;
    case DatasetKind::jtc:
    case DatasetKind::unintended:
      text_col = column(table, path, {"comment_text", "text"});
      break;
    case DatasetKind::davidson:
    case DatasetKind::founta:
      text_col = column(table, path, {"tweet", "text"});
      break;
  }

  // Resolve label columns up front so a schema mismatch fails before any row.
  std::vector<std::size_t> cols;
  switch (kind) {
    case DatasetKind::ruddit:
      cols = {column(table, path, {"score", "offensiveness_score"})};
      break;
    case DatasetKind::jtc:
      cols = {column(table, path, {"toxic"}),  column(table, path, {"severe_toxic"}),
              column(table, path, {"obscene"}), column(table, path, {"threat"}),
              column(table, path, {"insult"}), column(table, path, {"identity_hate"})};
      break;
    case DatasetKind::unintended:
      cols = {column(table, path, {"toxicity", "target"}),
              column(table, path, {"severe_toxicity"}),
              column(table, path, {"obscene"}), column(table, path, {"threat"}),
              column(table, path, {"insult"}),
              column(table, path, {"identity_attack"})};
      break;
    case DatasetKind::davidson:
      cols = {column(table, path, {"hate_speech"}),
              column(table, path, {"offensive_language"}),
              column(table, path, {"neither"})};
      break;
    case DatasetKind::founta:
      cols = {column(table, path, {"label"})};
      break;
  }

  IdRegistry ids(path);
  std::vector<LabeledExample> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t file_row = csv::Table::file_row(i);
    std::string id = id_col ? row[*id_col] : "r" + std::to_string(i + 1);
    ids.add(id, file_row);
    try {
      const auto num = [&](std::size_t k) { return csv::parse_double(row[cols[k]]); };
      const auto count = [&](std::size_t k) {
        const long long v = csv::parse_int(row[cols[k]]);
        if (v < 0) throw std::domain_error("negative coder count");
        return static_cast<unsigned>(v);
      };
      std::optional<SeverityScore> score;
      switch (kind) {
        case DatasetKind::ruddit:
          score = transform_ruddit(num(0));
          break;
        case DatasetKind::jtc: {
          JtcLabels l;
          l.toxic = parse_flag(row[cols[0]]);
          l.severe_toxic = parse_flag(row[cols[1]]);
          l.obscene = parse_flag(row[cols[2]]);
          l.threat = parse_flag(row[cols[3]]);
          l.insult = parse_flag(row[cols[4]]);
          l.identity_hate = parse_flag(row[cols[5]]);
          score = transform_jtc(l);
          break;
        }
        case DatasetKind::unintended: {
          UnintendedAttributes a;
          a.toxicity = num(0);
          a.severe_toxicity = num(1);
          a.obscene = num(2);
          a.threat = num(3);
          a.insult = num(4);
          a.identity_attack = num(5);
          score = transform_unintended(a);
          break;
        }
        case DatasetKind::davidson:
          score = transform_davidson({count(0), count(1), count(2)});
          break;
        case DatasetKind::founta: {
          const long long label = csv::parse_int(row[cols[0]]);
          if (label < 0 || label > 2) {
            throw std::domain_error("founta label must be 0, 1 or 2");
          }
          score = transform_founta(static_cast<int>(label));
          break;
        }
      }
      out.push_back({{std::move(id), row[text_col]}, *score,
                     std::string(to_string(kind))});
    } catch (const std::exception& e) {
      throw LoadError(at_row(path, file_row, e.what()));
    }
  }
  return out;
}

void write_labeled(std::ostream& out,
                   const std::vector<LabeledExample>& examples) {
  csv::write_record(out, {"comment_id", "text", "score"});
  for (const auto& ex : examples) {
    csv::write_record(out, {ex.comment.id, ex.comment.text,
                            csv::format_fixed(ex.score.value(), 6)});
  }
}

void save_labeled(const std::string& path,
                  const std::vector<LabeledExample>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path + "'");
  write_labeled(out, examples);
  if (!out) throw LoadError("write failed for '" + path + "'");
}

std::vector<LabeledExample> load_labeled(const std::string& path) {
  const csv::Table table = read_table(path);
  const std::size_t id_col = column(table, path, {"comment_id"});
  const std::size_t text_col = column(table, path, {"text"});
  const std::size_t score_col = column(table, path, {"score"});
  IdRegistry ids(path);
  std::vector<LabeledExample> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t file_row = csv::Table::file_row(i);
    ids.add(row[id_col], file_row);
    try {
      out.push_back({{row[id_col], row[text_col]},
                     SeverityScore(csv::parse_double(row[score_col])),
                     "labeled"});
    } catch (const std::exception& e) {
      throw LoadError(at_row(path, file_row, e.what()));
    }
  }
  return out;
}

std::array<std::size_t, 10> score_histogram(
    const std::vector<LabeledExample>& examples) {
  std::array<std::size_t, 10> bins{};
  for (const auto& ex : examples) {
    const auto bin = std::min<std::size_t>(
        9, static_cast<std::size_t>(std::floor(ex.score.value() * 10.0)));
    ++bins[bin];
  }
  return bins;
}

}  // namespace sevrank::corpus
