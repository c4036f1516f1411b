#include "sevrank/textproc.hpp"

#include <stdexcept>

#include "sevrank/csv.hpp"

namespace sevrank::textproc {

namespace detail {
extern const std::string_view kContractionsCsv;
}

namespace utf8 {

char32_t next(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(s[i]);
  };
  const unsigned char b0 = byte(pos);
  // Undecodable bytes map into the low-surrogate escape range so they can
  // never be mistaken for whitespace or letters.
  const auto invalid = [&] {
    ++pos;
    return static_cast<char32_t>(0xDC00 + b0);
  };
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return invalid();
  }
  if (pos + len > s.size()) return invalid();
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char b = byte(pos + k);
    if ((b & 0xC0) != 0x80) return invalid();
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    return invalid();
  }
  pos += len;
  return cp;
}

bool is_space(char32_t cp) {
  // Same set as Python's str.isspace().
  if (cp >= 0x09 && cp <= 0x0D) return true;
  if (cp >= 0x1C && cp <= 0x20) return true;
  switch (cp) {
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::vector<std::size_t> boundaries(std::string_view s) {
  std::vector<std::size_t> out;
  out.reserve(s.size() + 1);
  std::size_t pos = 0;
  while (pos < s.size()) {
    out.push_back(pos);
    next(s, pos);
  }
  out.push_back(s.size());
  return out;
}

}  // namespace utf8

namespace {

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

bool is_ascii_letter(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

std::string lookup_key(std::string_view run) {
  std::string key;
  std::size_t pos = 0;
  while (pos < run.size()) {
    const char32_t cp = utf8::next(run, pos);
    if (is_apostrophe(cp)) {
      key += '\'';
    } else if (cp >= 'A' && cp <= 'Z') {
      key += static_cast<char>(cp - 'A' + 'a');
    } else {
      key += static_cast<char>(cp);
    }
  }
  return key;
}

// Byte ranges [begin, end) of whitespace-separated words.
template <typename F>
void for_each_word(std::string_view text, F&& f) {
  std::size_t pos = 0;
  std::size_t word_start = std::string_view::npos;
  while (pos < text.size()) {
    const std::size_t here = pos;
    const char32_t cp = utf8::next(text, pos);
    if (utf8::is_space(cp)) {
      if (word_start != std::string_view::npos) {
        f(word_start, here);
        word_start = std::string_view::npos;
      }
    } else if (word_start == std::string_view::npos) {
      word_start = here;
    }
  }
  if (word_start != std::string_view::npos) f(word_start, text.size());
}

}  // namespace

ContractionTable parse_contractions(std::string_view csv_content) {
  const csv::Table table = csv::parse(csv_content);
  const std::size_t key_col = table.require_column("contraction");
  const std::size_t val_col = table.require_column("expansion");
  ContractionTable out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string key = lookup_key(row[key_col]);
    const std::string& value = row[val_col];
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("contraction table row " +
                                  std::to_string(csv::Table::file_row(i)) +
                                  ": empty field");
    }
    if (value.find('\'') != std::string::npos) {
      throw std::invalid_argument("contraction table row " +
                                  std::to_string(csv::Table::file_row(i)) +
                                  ": expansion contains an apostrophe");
    }
    out.emplace(key, value);
  }
  return out;
}

ContractionTable load_contractions(const std::string& path) {
  return parse_contractions(csv::read_text_file(path));
}

const ContractionTable& default_contractions() {
  static const ContractionTable table = parse_contractions(detail::kContractionsCsv);
  return table;
}

std::string strip_urls(std::string_view text) {
  static constexpr std::string_view kPrefixes[] = {"http://", "https://", "www."};
  const auto starts_with_ci = [&](std::size_t at, std::string_view prefix) {
    if (at + prefix.size() > text.size()) return false;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
      char c = text[at + k];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      if (c != prefix[k]) return false;
    }
    return true;
  };
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool is_url = false;
    for (auto prefix : kPrefixes) {
      if (starts_with_ci(pos, prefix)) {
        is_url = true;
        break;
      }
    }
    if (!is_url) {
      const std::size_t start = pos;
      utf8::next(text, pos);
      out.append(text.substr(start, pos - start));
      continue;
    }
    while (pos < text.size()) {
      std::size_t probe = pos;
      if (utf8::is_space(utf8::next(text, probe))) break;
      pos = probe;
    }
  }
  return out;
}

std::string expand_contractions(std::string_view text,
                                const ContractionTable& contractions) {
  std::string out;
  out.reserve(text.size() + text.size() / 4);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    std::size_t probe = pos;
    char32_t cp = utf8::next(text, probe);
    if (!is_ascii_letter(cp) && !is_apostrophe(cp)) {
      out.append(text.substr(start, probe - start));
      pos = probe;
      continue;
    }
    // Maximal run of letters and apostrophes.
    std::size_t end = start;
    while (end < text.size()) {
      std::size_t after = end;
      cp = utf8::next(text, after);
      if (!is_ascii_letter(cp) && !is_apostrophe(cp)) break;
      end = after;
    }
    std::string_view run = text.substr(start, end - start);
    pos = end;

    if (auto it = contractions.find(lookup_key(run)); it != contractions.end()) {
      out += it->second;
      continue;
    }
    // Retry without surrounding quote marks.
    std::size_t lead = 0;
    std::size_t trail = run.size();
    while (lead < trail) {
      std::size_t p = lead;
      if (!is_apostrophe(utf8::next(run, p))) break;
      lead = p;
    }
    while (trail > lead) {
      std::size_t back = trail - 1;
      while (back > lead && (static_cast<unsigned char>(run[back]) & 0xC0) == 0x80) --back;
      std::size_t p = back;
      if (!is_apostrophe(utf8::next(run, p))) break;
      trail = back;
    }
    const std::string_view core = run.substr(lead, trail - lead);
    auto it = core.empty() ? contractions.end() : contractions.find(lookup_key(core));
    if (it == contractions.end()) {
      out.append(run);
    } else {
      out.append(run.substr(0, lead));
      out += it->second;
      out.append(run.substr(trail));
    }
  }
  return out;
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for_each_word(text, [&](std::size_t b, std::size_t e) {
    if (!out.empty()) out += ' ';
    out.append(text.substr(b, e - b));
  });
  return out;
}

std::string preprocess(std::string_view text, const PreprocessConfig& config) {
  return preprocess(text, config, default_contractions());
}

std::string preprocess(std::string_view text, const PreprocessConfig& config,
                       const ContractionTable& contractions) {
  std::string s(text);
  if (config.strip_urls) s = strip_urls(s);
  if (config.expand_contractions) s = expand_contractions(s, contractions);
  if (config.lowercase) s = to_lower_ascii(s);
  s = collapse_whitespace(s);
  if (config.stem) {
    std::string stemmed;
    stemmed.reserve(s.size());
    for_each_word(s, [&](std::size_t b, std::size_t e) {
      if (!stemmed.empty()) stemmed += ' ';
      stemmed += porter_stem(std::string_view(s).substr(b, e - b));
    });
    s = std::move(stemmed);
  }
  return s;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  for_each_word(text, [&](std::size_t b, std::size_t e) {
    out.emplace_back(text.substr(b, e - b));
  });
  return out;
}

void for_each_char_wb_ngram(std::string_view text, int n_min, int n_max,
                            const std::function<void(std::string_view)>& sink) {
  if (n_min < 1 || n_max < n_min) {
    throw std::domain_error("char_wb_ngrams: need 1 <= n_min <= n_max, got (" +
                            std::to_string(n_min) + ", " +
                            std::to_string(n_max) + ")");
  }
  std::string padded;
  std::vector<std::size_t> cuts;
  for_each_word(text, [&](std::size_t b, std::size_t e) {
    padded.clear();
    padded += ' ';
    padded.append(text.substr(b, e - b));
    padded += ' ';
    cuts.clear();
    std::size_t pos = 0;
    while (pos < padded.size()) {
      cuts.push_back(pos);
      utf8::next(padded, pos);
    }
    cuts.push_back(padded.size());
    const std::size_t len = cuts.size() - 1;  // code points
    const std::string_view view(padded);
    for (int n = n_min; n <= n_max; ++n) {
      const auto un = static_cast<std::size_t>(n);
      if (len <= un) {
        sink(view);
        break;
      }
      for (std::size_t i = 0; i + un <= len; ++i) {
        sink(view.substr(cuts[i], cuts[i + un] - cuts[i]));
      }
    }
  });
}

std::vector<std::string> char_wb_ngrams(std::string_view text, int n_min,
                                        int n_max) {
  std::vector<std::string> out;
  for_each_char_wb_ngram(text, n_min, n_max,
                         [&](std::string_view g) { out.emplace_back(g); });
  return out;
}

}  // namespace sevrank::textproc
