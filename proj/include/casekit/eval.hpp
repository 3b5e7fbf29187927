#pragma once

#include <string>
#include <vector>

#include "casekit/corpus.hpp"

namespace casekit::eval {

struct PRF {
  size_t true_positives = 0;
  size_t false_positives = 0;
  size_t false_negatives = 0;

  // Zero-denominator convention: precision/recall are 1.0 when no positives
  // exist on the respective side.
  double precision() const;
  double recall() const;
  double f1() const;
};

struct Span {
  std::string type;
  size_t start = 0;  // inclusive token indices
  size_t end = 0;

  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

// conlleval-style extraction with repair: an I-X after O, at sentence start,
// or after a different type opens a span.
std::vector<Span> extract_spans(const std::vector<std::string>& tags);

// Truecasing quality at the word level. A gold positive is a token whose
// gold surface differs from its lowercased form; a true positive additionally
// matches the prediction exactly.
PRF word_level_prf(const corpus::Corpus& gold, const corpus::Corpus& predicted);

struct SpanResult {
  PRF overall;
  std::vector<std::pair<std::string, PRF>> per_type;  // sorted by type
};

SpanResult span_prf(const corpus::Corpus& gold,
                    const std::vector<std::vector<std::string>>& predicted);

double token_accuracy(const corpus::Corpus& gold,
                      const std::vector<std::vector<std::string>>& predicted);

// Deletes predicted MISC spans, then retypes every remaining span (gold and
// predicted) to one generic type and scores exact boundary matches.
PRF mention_detection_prf(const corpus::Corpus& gold,
                          const std::vector<std::vector<std::string>>& predicted);

double scenario_average(double cased_score, double uncased_score);

// Half-up rounding to two decimals, applied only when rendering.
std::string render_score(double value);

}  // namespace casekit::eval
