#include "casekit/casing.hpp"

#include "casekit/errors.hpp"
#include "casekit/rng.hpp"
#include "casekit/utf8.hpp"

namespace casekit::casing {

bool is_upper(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return true;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return true;
  if (cp == 0x178) return true;  // Ÿ
  return false;
}

bool has_upper_variant(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return true;
  if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return true;
  if (cp == 0xFF) return true;  // ÿ → Ÿ
  return false;
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp == 0x178) return 0xFF;
  return cp;
}

char32_t to_upper(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return cp - 0x20;
  if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 0x20;
  if (cp == 0xFF) return 0x178;
  return cp;
}

std::string lowercase_text(const std::string& s) {
  auto cps = utf8::decode(s);
  for (auto& cp : cps) cp = to_lower(cp);
  return utf8::encode(cps);
}

CasePattern extract_case_pattern(const std::string& s) {
  const auto cps = utf8::decode(s);
  CasePattern pattern;
  pattern.reserve(cps.size());
  for (char32_t cp : cps) pattern.push_back(is_upper(cp));
  return pattern;
}

std::string apply_case_pattern(const std::string& s_lower,
                               const CasePattern& pattern) {
  auto cps = utf8::decode(s_lower);
  if (cps.size() != pattern.size()) {
    throw ContractViolation("case pattern length " + std::to_string(pattern.size()) +
                            " does not match character count " +
                            std::to_string(cps.size()));
  }
  for (size_t i = 0; i < cps.size(); ++i) {
    if (pattern[i] && has_upper_variant(cps[i])) cps[i] = to_upper(cps[i]);
  }
  return utf8::encode(cps);
}

AugmentationStrategy parse_strategy(const std::string& s) {
  if (s == "cased") return AugmentationStrategy::cased();
  if (s == "uncased") return AugmentationStrategy::uncased();
  if (s == "c+u") return AugmentationStrategy::cased_plus_uncased();
  if (s == "truecase-train") return AugmentationStrategy::truecase_train();
  const std::string prefix = "half-mixed:";
  if (s.rfind(prefix, 0) == 0) {
    double p;
    try {
      p = std::stod(s.substr(prefix.size()));
    } catch (const std::exception&) {
      throw ParseError("bad half-mixed probability in '" + s + "'");
    }
    if (p < 0.0 || p > 1.0) {
      throw ContractViolation("half-mixed probability must lie in [0,1]");
    }
    return AugmentationStrategy::half_mixed(p);
  }
  throw ParseError("unknown strategy '" + s +
                   "' (expected cased|uncased|c+u|half-mixed:<p>|truecase-train)");
}

std::string strategy_name(const AugmentationStrategy& s) {
  switch (s.kind) {
    case StrategyKind::CASED: return "cased";
    case StrategyKind::UNCASED: return "uncased";
    case StrategyKind::CASED_PLUS_UNCASED: return "c+u";
    case StrategyKind::HALF_MIXED:
      return "half-mixed:" + std::to_string(s.mix_probability);
    case StrategyKind::TRUECASE_TRAIN: return "truecase-train";
  }
  return "?";
}

namespace {

corpus::Sentence lowercase_sentence(const corpus::Sentence& s) {
  corpus::Sentence out = s;
  for (auto& t : out.tokens) t.surface = lowercase_text(t.surface);
  return out;
}

std::vector<std::string> split_spaces(const std::string& text) {
  std::vector<std::string> parts;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    size_t start = i;
    while (i < text.size() && text[i] != ' ') ++i;
    if (i > start) parts.push_back(text.substr(start, i - start));
  }
  return parts;
}

corpus::Sentence truecase_sentence(const corpus::Sentence& s,
                                   const TruecaseFn& truecase_fn) {
  std::string text;
  for (size_t i = 0; i < s.tokens.size(); ++i) {
    if (i) text += ' ';
    text += lowercase_text(s.tokens[i].surface);
  }
  const std::string restored = truecase_fn(text);
  const auto parts = split_spaces(restored);
  if (parts.size() != s.tokens.size()) {
    throw Error("truecase function changed token boundaries (" +
                std::to_string(s.tokens.size()) + " tokens in, " +
                std::to_string(parts.size()) + " out)");
  }
  corpus::Sentence out = s;
  for (size_t i = 0; i < parts.size(); ++i) out.tokens[i].surface = parts[i];
  return out;
}

}  // namespace

corpus::Corpus augment_corpus(const corpus::Corpus& c,
                              const AugmentationStrategy& strategy,
                              uint64_t seed,
                              const TruecaseFn& truecase_fn) {
  corpus::Corpus out;
  out.tagset_kind = c.tagset_kind;
  switch (strategy.kind) {
    case StrategyKind::CASED:
      out.sentences = c.sentences;
      break;
    case StrategyKind::UNCASED:
      for (const auto& s : c.sentences) {
        out.sentences.push_back(s.is_document_start ? s : lowercase_sentence(s));
      }
      break;
    case StrategyKind::CASED_PLUS_UNCASED:
      out.sentences = c.sentences;
      for (const auto& s : c.sentences) {
        if (!s.is_document_start) out.sentences.push_back(lowercase_sentence(s));
      }
      break;
    case StrategyKind::HALF_MIXED:
      for (size_t i = 0; i < c.sentences.size(); ++i) {
        const auto& s = c.sentences[i];
        if (!s.is_document_start &&
            Rng(seed, i).bernoulli(strategy.mix_probability)) {
          out.sentences.push_back(lowercase_sentence(s));
        } else {
          out.sentences.push_back(s);
        }
      }
      break;
    case StrategyKind::TRUECASE_TRAIN:
      if (!truecase_fn) {
        throw ContractViolation("truecase-train strategy requires a truecase function");
      }
      for (const auto& s : c.sentences) {
        out.sentences.push_back(s.is_document_start
                                    ? s
                                    : truecase_sentence(s, truecase_fn));
      }
      break;
  }
  return out;
}

}  // namespace casekit::casing
