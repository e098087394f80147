#include "sigtrade/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>

#include "sigtrade/errors.hpp"

namespace sigtrade {

namespace {

bool is_token_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Whitespace-delimited pieces that are URLs or @-mentions are dropped whole.
bool drop_piece(std::string_view piece) {
  if (piece.empty()) return false;
  if (piece[0] == '@') return true;
  const std::string low = lower(piece);
  return low.rfind("http://", 0) == 0 || low.rfind("https://", 0) == 0 ||
         low.rfind("www.", 0) == 0;
}

void validate_stem(const std::string& stem) {
  const auto star = stem.find('*');
  if (star == std::string::npos) return;
  if (star != stem.size() - 1 || star == 0)
    throw DataError(ErrorKind::malformed_stem,
                    "stem '" + stem + "' must use a single trailing asterisk");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Lexicon Lexicon::load_valence_csv(const std::filesystem::path& path, double scale_min,
                                  double scale_max) {
  std::ifstream in(path);
  if (!in) throw DataError(ErrorKind::io, "cannot open lexicon '" + path.string() + "'");
  Lexicon lex;
  lex.kind = LexiconKind::valence;
  lex.scale_min = scale_min;
  lex.scale_max = scale_max;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("term", 0) == 0) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw DataError(ErrorKind::parse,
                      path.string() + ":" + std::to_string(lineno) + ": expected 'term,score'");
    const std::string term = lower(fields[0]);
    char* end = nullptr;
    const double score = std::strtod(fields[1].c_str(), &end);
    if (end == fields[1].c_str() || *end != '\0' || !std::isfinite(score))
      throw DataError(ErrorKind::parse, path.string() + ":" + std::to_string(lineno) +
                                            ": bad score '" + fields[1] + "'");
    if (score < scale_min || score > scale_max)
      throw DataError(ErrorKind::parse, path.string() + ":" + std::to_string(lineno) +
                                            ": score outside declared scale");
    lex.scores[term] = score;
  }
  return lex;
}

Lexicon Lexicon::load_polarity_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(ErrorKind::io, "cannot open lexicon '" + path.string() + "'");
  Lexicon lex;
  lex.kind = LexiconKind::polarity;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("term", 0) == 0) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw DataError(ErrorKind::parse,
                      path.string() + ":" + std::to_string(lineno) + ": expected 'term,polarity'");
    const std::string term = lower(fields[0]);
    Polarity pol;
    if (fields[1] == "pos")
      pol = Polarity::positive;
    else if (fields[1] == "neg")
      pol = Polarity::negative;
    else
      throw DataError(ErrorKind::parse, path.string() + ":" + std::to_string(lineno) +
                                            ": polarity must be 'pos' or 'neg'");
    if (!term.empty() && term.back() == '*') {
      validate_stem(term);
      lex.stems.emplace_back(term.substr(0, term.size() - 1), pol);
    } else {
      validate_stem(term);
      auto [it, inserted] = lex.terms.emplace(term, pol);
      if (!inserted && it->second != pol)
        throw DataError(ErrorKind::parse, path.string() + ":" + std::to_string(lineno) +
                                              ": term '" + term + "' listed with both polarities");
    }
  }
  return lex;
}

std::optional<Polarity> Lexicon::classify(const std::string& token) const {
  if (kind != LexiconKind::polarity)
    throw ConfigError(ErrorKind::wrong_lexicon_kind, "polarity lookup on a valence lexicon");
  if (auto it = terms.find(token); it != terms.end()) return it->second;
  const std::pair<std::string, Polarity>* best = nullptr;
  for (const auto& s : stems) {
    if (token.size() < s.first.size()) continue;
    if (token.compare(0, s.first.size(), s.first) != 0) continue;
    if (!best || s.first.size() > best->first.size()) best = &s;
  }
  if (best) return best->second;
  return std::nullopt;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    const std::string_view piece = text.substr(i, j - i);
    i = j;
    if (piece.empty() || drop_piece(piece)) continue;
    std::size_t a = 0;
    while (a < piece.size()) {
      while (a < piece.size() && !is_token_char(piece[a])) ++a;
      std::size_t b = a;
      while (b < piece.size() && is_token_char(piece[b])) ++b;
      if (b > a) tokens.push_back(lower(piece.substr(a, b - a)));
      a = b;
    }
  }
  return tokens;
}

std::set<std::string> expand_stems(const std::vector<std::string>& stems,
                                   const std::vector<std::string>& vocabulary) {
  std::set<std::string> out;
  for (const auto& raw : stems) {
    validate_stem(raw);
    if (raw.empty()) continue;
    if (raw.back() == '*') {
      const std::string prefix = raw.substr(0, raw.size() - 1);
      for (const auto& word : vocabulary)
        if (word.size() >= prefix.size() && word.compare(0, prefix.size(), prefix) == 0)
          out.insert(word);
    } else {
      out.insert(raw);  // literal terms pass through
    }
  }
  return out;
}

std::optional<double> daily_valence(const DocBatch& batch, const Lexicon& lex) {
  if (lex.kind != LexiconKind::valence)
    throw ConfigError(ErrorKind::wrong_lexicon_kind, "daily valence needs a valence lexicon");
  double weight = 0.0, weighted = 0.0;
  for (const auto& doc : batch.documents) {
    for (const auto& tok : doc) {
      if (auto it = lex.scores.find(tok); it != lex.scores.end()) {
        weight += 1.0;
        weighted += it->second;
      }
    }
  }
  if (weight == 0.0) return std::nullopt;
  return weighted / weight;
}

double daily_polarization(const DocBatch& batch, const Lexicon& lex) {
  if (lex.kind != LexiconKind::polarity)
    throw ConfigError(ErrorKind::wrong_lexicon_kind, "polarization needs a polarity lexicon");
  if (batch.documents.empty())
    throw DataError(ErrorKind::empty_day, "polarization of a day with no documents");
  double pos = 0.0, neg = 0.0;
  for (const auto& doc : batch.documents) {
    for (const auto& tok : doc) {
      const auto cls = lex.classify(tok);
      if (!cls) continue;
      if (*cls == Polarity::positive)
        pos += 1.0;
      else
        neg += 1.0;
    }
  }
  const double n_docs = static_cast<double>(batch.documents.size());
  return std::sqrt((pos / n_docs) * (neg / n_docs));
}

SentimentSignals build_signals(std::istream& corpus, const Lexicon& valence_lex,
                               const Lexicon& polarity_lex, Date start, Date end) {
  if (valence_lex.kind != LexiconKind::valence)
    throw ConfigError(ErrorKind::wrong_lexicon_kind, "first lexicon must be valence kind");
  if (polarity_lex.kind != LexiconKind::polarity)
    throw ConfigError(ErrorKind::wrong_lexicon_kind, "second lexicon must be polarity kind");
  if (end < start) throw ConfigError(ErrorKind::bad_config, "corpus range is empty");

  SentimentSignals out;
  // Unique texts per day, in first-seen order (set gives exact-duplicate dedup).
  std::map<Date, std::vector<std::string>> days;
  std::map<Date, std::set<std::string>> seen;
  std::string line;
  while (std::getline(corpus, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++out.records_read;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      ++out.records_skipped;
      continue;
    }
    Date d;
    try {
      d = Date::parse(std::string_view(line).substr(0, tab));
    } catch (const Error&) {
      ++out.records_skipped;
      continue;
    }
    if (d < start || end < d) continue;
    const std::string text = line.substr(tab + 1);
    auto [it, inserted] = seen[d].insert(text);
    if (inserted) days[d].push_back(text);
  }

  out.volume.name = "t_n";
  out.valence.name = "t_val";
  out.polarization.name = "t_pol";
  for (const auto& [date, texts] : days) {
    DocBatch batch;
    batch.date = date;
    batch.documents.reserve(texts.size());
    for (const auto& t : texts) batch.documents.push_back(tokenize(t));

    out.volume.dates.push_back(date);
    out.volume.values.push_back(static_cast<double>(texts.size()));

    if (const auto v = daily_valence(batch, valence_lex)) {
      out.valence.dates.push_back(date);
      out.valence.values.push_back(*v);
    }

    out.polarization.dates.push_back(date);
    out.polarization.values.push_back(daily_polarization(batch, polarity_lex));
  }
  return out;
}

}  // namespace sigtrade
