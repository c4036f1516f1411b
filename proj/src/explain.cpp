#include "sevrank/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "sevrank/csv.hpp"
#include "sevrank/random.hpp"
#include "sevrank/textproc.hpp"

namespace sevrank::explain {

namespace {

// Solves the symmetric positive definite system A x = b in place (Cholesky).
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) throw std::runtime_error("local model system is not positive definite");
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return b;
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Explanation lime_explain(const Scorer& scorer, std::string_view text,
                         const ExplainConfig& config) {
  if (config.num_samples < 10) throw std::invalid_argument("num_samples must be >= 10");
  if (config.num_features < 1) throw std::invalid_argument("num_features must be >= 1");
  if (config.kernel_width && !(*config.kernel_width > 0.0)) {
    throw std::invalid_argument("kernel_width must be positive");
  }

  Explanation ex;
  ex.text = std::string(text);
  ex.tokens = textproc::tokenize_words(text);
  if (ex.tokens.empty()) throw std::invalid_argument("text has no words to explain");

  std::vector<std::string> words;
  std::unordered_map<std::string, std::size_t> word_index;
  std::vector<std::size_t> token_word(ex.tokens.size());
  for (std::size_t t = 0; t < ex.tokens.size(); ++t) {
    auto [it, inserted] = word_index.emplace(ex.tokens[t], words.size());
    if (inserted) words.push_back(ex.tokens[t]);
    token_word[t] = it->second;
  }
  const std::size_t d = words.size();
  const auto n = static_cast<std::size_t>(config.num_samples);
  const double width = config.kernel_width.value_or(
      std::max(1.0, 0.75 * std::sqrt(static_cast<double>(d))));

  // Masks, scores and kernel weights.
  Rng rng(config.seed);
  std::vector<unsigned char> masks(n * d, 1);
  std::vector<double> y(n);
  std::vector<double> sw(n);
  std::string variant;
  for (std::size_t s = 0; s < n; ++s) {
    unsigned char* m = &masks[s * d];
    if (s > 0) {
      for (std::size_t j = 0; j < d; ++j) m[j] = rng.coin() ? 1 : 0;
    }
    variant.clear();
    for (std::size_t t = 0; t < ex.tokens.size(); ++t) {
      if (!m[token_word[t]]) continue;
      if (!variant.empty()) variant += ' ';
      variant += ex.tokens[t];
    }
    y[s] = scorer(variant);
    if (!std::isfinite(y[s])) {
      throw std::runtime_error("scorer returned a non-finite value for sample " +
                               std::to_string(s));
    }
    const auto kept = static_cast<double>(std::count(m, m + d, 1));
    const double dist = kept > 0.0 ? 1.0 - std::sqrt(kept / static_cast<double>(d)) : 1.0;
    sw[s] = std::exp(-(dist * dist) / (width * width));
  }

  // Weighted ridge with an unpenalized intercept via weighted centering.
  const double wsum = std::accumulate(sw.begin(), sw.end(), 0.0);
  std::vector<double> xmean(d, 0.0);
  double ymean = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    ymean += sw[s] * y[s];
    for (std::size_t j = 0; j < d; ++j) xmean[j] += sw[s] * masks[s * d + j];
  }
  ymean /= wsum;
  for (double& v : xmean) v /= wsum;

  std::vector<double> gram(d * d, 0.0);
  std::vector<double> rhs(d, 0.0);
  std::vector<double> xc(d);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < d; ++j) xc[j] = masks[s * d + j] - xmean[j];
    const double yc = y[s] - ymean;
    for (std::size_t i = 0; i < d; ++i) {
      const double wi = sw[s] * xc[i];
      rhs[i] += wi * yc;
      for (std::size_t j = 0; j <= i; ++j) gram[i * d + j] += wi * xc[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    gram[i * d + i] += config.ridge_alpha;
    for (std::size_t j = 0; j < i; ++j) gram[j * d + i] = gram[i * d + j];
  }
  const std::vector<double> coef = solve_spd(std::move(gram), std::move(rhs), d);
  ex.intercept = ymean;
  for (std::size_t j = 0; j < d; ++j) ex.intercept -= coef[j] * xmean[j];

  double ss_res = 0.0;
  double ss_tot = 0.0;
  double ss_scale = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double pred = ex.intercept;
    for (std::size_t j = 0; j < d; ++j) pred += coef[j] * masks[s * d + j];
    ss_res += sw[s] * (y[s] - pred) * (y[s] - pred);
    ss_tot += sw[s] * (y[s] - ymean) * (y[s] - ymean);
    ss_scale += sw[s] * y[s] * y[s];
  }
  // A constant response leaves only rounding noise in ss_tot.
  ex.local_r2 = ss_tot > 1e-24 * std::max(ss_scale, 1.0) ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(coef[a]) > std::abs(coef[b]);
  });
  const std::size_t keep = std::min(d, static_cast<std::size_t>(config.num_features));
  for (std::size_t k = 0; k < keep; ++k) {
    ex.importances.push_back({words[order[k]], coef[order[k]]});
  }
  return ex;
}

std::string explanation_json(const Explanation& ex) {
  nlohmann::ordered_json j;
  j["text"] = ex.text;
  j["tokens"] = ex.tokens;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& w : ex.importances) {
    arr.push_back({{"word", w.word}, {"weight", w.weight}});
  }
  j["importances"] = std::move(arr);
  j["intercept"] = ex.intercept;
  j["local_r2"] = ex.local_r2;
  return j.dump(2);
}

std::string explanation_html(const Explanation& ex) {
  std::unordered_map<std::string_view, double> weight;
  double max_abs = 0.0;
  for (const auto& w : ex.importances) {
    weight.emplace(w.word, w.weight);
    max_abs = std::max(max_abs, std::abs(w.weight));
  }
  std::ostringstream out;
  out << "<p class=\"sevrank-explanation\">";
  for (std::size_t t = 0; t < ex.tokens.size(); ++t) {
    double alpha = 0.0;
    if (auto it = weight.find(ex.tokens[t]); it != weight.end() && max_abs > 0.0) {
      alpha = std::abs(it->second) / max_abs;
    }
    if (t) out << ' ';
    out << "<span style=\"background-color: rgba(255,0,0," << csv::format_fixed(alpha, 4)
        << ")\">" << html_escape(ex.tokens[t]) << "</span>";
  }
  out << "</p>\n";
  return out.str();
}

}  // namespace sevrank::explain
