#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sigtrade/date.hpp"
#include "sigtrade/signal.hpp"

namespace sigtrade {

enum class LexiconKind { valence, polarity };
enum class Polarity { positive, negative };

// Term scores for sentiment measurement. A valence lexicon maps words to a
// bounded pleasantness score; a polarity lexicon classifies words as positive
// or negative, with optional trailing-asterisk stems matched by prefix.
struct Lexicon {
  LexiconKind kind = LexiconKind::valence;

  // valence kind
  double scale_min = 1.0;
  double scale_max = 9.0;
  std::unordered_map<std::string, double> scores;

  // polarity kind
  std::unordered_map<std::string, Polarity> terms;           // literal words
  std::vector<std::pair<std::string, Polarity>> stems;       // prefixes, '*' stripped

  // CSV "term,score". Scores must lie within [scale_min, scale_max].
  static Lexicon load_valence_csv(const std::filesystem::path& path, double scale_min = 1.0,
                                  double scale_max = 9.0);
  // CSV "term,polarity" with polarity in {pos, neg}; terms ending in '*' are
  // stems. A word may not carry both polarities.
  static Lexicon load_polarity_csv(const std::filesystem::path& path);

  // Polarity of a token: literal entries win over stems; among stems the
  // longest matching prefix wins. nullopt when nothing matches.
  std::optional<Polarity> classify(const std::string& token) const;
};

// One day's documents, already tokenized and lowercased.
struct DocBatch {
  Date date;
  std::vector<std::vector<std::string>> documents;
};

// Lowercases, strips URLs and @-mentions, splits on non-alphanumeric
// boundaries (which also removes a leading '#').
std::vector<std::string> tokenize(std::string_view text);

// Expands trailing-asterisk stems against a vocabulary by prefix match.
// A bare term (no '*') passes through as itself. Interior or leading
// asterisks are malformed.
std::set<std::string> expand_stems(const std::vector<std::string>& stems,
                                   const std::vector<std::string>& vocabulary);

// Frequency-weighted mean score over all matched tokens of the day:
// sum freq(w) score(w) / sum freq(w). nullopt when no token matches.
std::optional<double> daily_valence(const DocBatch& batch, const Lexicon& lex);

// sqrt(P * N) where P and N are positive/negative token counts per document.
double daily_polarization(const DocBatch& batch, const Lexicon& lex);

struct SentimentSignals {
  Signal volume;        // unique documents per day
  Signal valence;       // days with at least one matched token
  Signal polarization;  // days with at least one document
  std::size_t records_read = 0;
  std::size_t records_skipped = 0;  // malformed lines
};

// Streams newline-delimited "timestamp<TAB>text" records, bins them by UTC
// day, deduplicates exact text copies within a day, and computes the three
// daily signals over [start, end]. Records outside the range are ignored;
// malformed records are skipped and counted.
SentimentSignals build_signals(std::istream& corpus, const Lexicon& valence_lex,
                               const Lexicon& polarity_lex, Date start, Date end);

}  // namespace sigtrade
