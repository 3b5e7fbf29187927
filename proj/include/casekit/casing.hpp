#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "casekit/corpus.hpp"

namespace casekit::casing {

// Per-character upper/lower labels aligned to a string of the same length
// (in Unicode scalar values). true = U, false = L.
using CasePattern = std::vector<bool>;

enum class StrategyKind {
  CASED,
  UNCASED,
  CASED_PLUS_UNCASED,
  HALF_MIXED,
  TRUECASE_TRAIN,
};

struct AugmentationStrategy {
  StrategyKind kind = StrategyKind::CASED;
  double mix_probability = 0.5;  // HALF_MIXED only

  static AugmentationStrategy cased() { return {StrategyKind::CASED}; }
  static AugmentationStrategy uncased() { return {StrategyKind::UNCASED}; }
  static AugmentationStrategy cased_plus_uncased() {
    return {StrategyKind::CASED_PLUS_UNCASED};
  }
  static AugmentationStrategy half_mixed(double p) {
    return {StrategyKind::HALF_MIXED, p};
  }
  static AugmentationStrategy truecase_train() {
    return {StrategyKind::TRUECASE_TRAIN};
  }
};

// Parses the CLI spelling: cased | uncased | c+u | half-mixed:<p> |
// truecase-train.
AugmentationStrategy parse_strategy(const std::string& s);
std::string strategy_name(const AugmentationStrategy& s);

// Case predicates on Unicode scalar values. Coverage is ASCII plus the
// Latin-1 supplement; corpora in scope are English, and restricting to 1:1
// mappings keeps case patterns aligned character-for-character.
bool is_upper(char32_t cp);
bool has_upper_variant(char32_t cp);
char32_t to_lower(char32_t cp);
char32_t to_upper(char32_t cp);

// Per-character simple lowercasing; character count is preserved.
std::string lowercase_text(const std::string& s);

// U at position i iff character i is an uppercase letter.
CasePattern extract_case_pattern(const std::string& s);

// Uppercases character i iff pattern[i] and the character has an uppercase
// variant. Pattern length must equal the character count of s_lower.
std::string apply_case_pattern(const std::string& s_lower,
                               const CasePattern& pattern);

using TruecaseFn = std::function<std::string(const std::string&)>;

// Applies one of the training-data casing strategies. Only token surfaces
// change; tags and sentence structure flow through. Document-start markers
// are never lowercased or duplicated. HALF_MIXED draws per sentence from a
// generator keyed by (seed, sentence index), so reordering the corpus does
// not change which sentences flip.
corpus::Corpus augment_corpus(const corpus::Corpus& c,
                              const AugmentationStrategy& strategy,
                              uint64_t seed,
                              const TruecaseFn& truecase_fn = nullptr);

}  // namespace casekit::casing
