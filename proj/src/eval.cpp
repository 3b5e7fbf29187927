#include "casekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "casekit/casing.hpp"
#include "casekit/errors.hpp"

namespace casekit::eval {

double PRF::precision() const {
  const size_t denom = true_positives + false_positives;
  return denom == 0 ? 1.0 : static_cast<double>(true_positives) / denom;
}

double PRF::recall() const {
  const size_t denom = true_positives + false_negatives;
  return denom == 0 ? 1.0 : static_cast<double>(true_positives) / denom;
}

double PRF::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::vector<Span> extract_spans(const std::vector<std::string>& tags) {
  std::vector<Span> spans;
  std::string open_type;
  size_t open_start = 0;
  auto close = [&](size_t end) {
    if (!open_type.empty()) {
      spans.push_back(Span{open_type, open_start, end});
      open_type.clear();
    }
  };
  for (size_t t = 0; t < tags.size(); ++t) {
    const std::string& tag = tags[t];
    if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
      const std::string type = tag.substr(2);
      const bool continues = tag[0] == 'I' && open_type == type;
      if (!continues) {
        close(t - 1);
        open_type = type;
        open_start = t;
      }
    } else {
      close(t - 1);
    }
  }
  close(tags.empty() ? 0 : tags.size() - 1);
  return spans;
}

namespace {

void check_alignment(const corpus::Corpus& gold,
                     const std::vector<std::vector<std::string>>& predicted) {
  if (predicted.size() != gold.sentences.size()) {
    throw ContractViolation("prediction count " + std::to_string(predicted.size()) +
                            " does not match sentence count " +
                            std::to_string(gold.sentences.size()));
  }
  for (size_t i = 0; i < predicted.size(); ++i) {
    const auto& s = gold.sentences[i];
    if (s.is_document_start) continue;
    if (predicted[i].size() != s.tokens.size()) {
      throw ContractViolation("sentence " + std::to_string(i) +
                              ": prediction length mismatch");
    }
  }
}

std::vector<std::string> gold_tags(const corpus::Sentence& s) {
  std::vector<std::string> tags;
  tags.reserve(s.tokens.size());
  for (const auto& t : s.tokens) tags.push_back(t.tag.value_or("O"));
  return tags;
}

void score_spans(std::vector<Span> gold, std::vector<Span> pred,
                 std::map<std::string, PRF>& per_type) {
  std::sort(gold.begin(), gold.end());
  std::sort(pred.begin(), pred.end());
  std::vector<Span> matched;
  std::set_intersection(gold.begin(), gold.end(), pred.begin(), pred.end(),
                        std::back_inserter(matched));
  for (const auto& sp : matched) ++per_type[sp.type].true_positives;
  for (const auto& sp : gold) ++per_type[sp.type].false_negatives;
  for (const auto& sp : pred) ++per_type[sp.type].false_positives;
  // fn/fp counters above include matches; correct them
  for (const auto& sp : matched) {
    --per_type[sp.type].false_negatives;
    --per_type[sp.type].false_positives;
  }
}

}  // namespace

PRF word_level_prf(const corpus::Corpus& gold, const corpus::Corpus& predicted) {
  if (gold.sentences.size() != predicted.sentences.size()) {
    throw ContractViolation("word_level_prf: sentence count mismatch");
  }
  PRF out;
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const auto& gs = gold.sentences[i];
    const auto& ps = predicted.sentences[i];
    if (gs.is_document_start && ps.is_document_start) continue;
    if (gs.tokens.size() != ps.tokens.size()) {
      throw ContractViolation("word_level_prf: sentence " + std::to_string(i) +
                              " is misaligned");
    }
    for (size_t t = 0; t < gs.tokens.size(); ++t) {
      const std::string& g = gs.tokens[t].surface;
      const std::string& p = ps.tokens[t].surface;
      const bool gold_pos = g != casing::lowercase_text(g);
      const bool pred_pos = p != casing::lowercase_text(p);
      if (gold_pos && pred_pos && g == p) {
        ++out.true_positives;
      } else {
        if (pred_pos) ++out.false_positives;
        if (gold_pos) ++out.false_negatives;
      }
    }
  }
  return out;
}

SpanResult span_prf(const corpus::Corpus& gold,
                    const std::vector<std::vector<std::string>>& predicted) {
  if (gold.tagset_kind != corpus::TagsetKind::NER_BIO) {
    throw Error("span_prf requires BIO tags");
  }
  check_alignment(gold, predicted);
  std::map<std::string, PRF> per_type;
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const auto& s = gold.sentences[i];
    if (s.is_document_start) continue;
    score_spans(extract_spans(gold_tags(s)), extract_spans(predicted[i]), per_type);
  }
  SpanResult result;
  for (const auto& [type, prf] : per_type) {
    result.overall.true_positives += prf.true_positives;
    result.overall.false_positives += prf.false_positives;
    result.overall.false_negatives += prf.false_negatives;
    result.per_type.emplace_back(type, prf);
  }
  return result;
}

double token_accuracy(const corpus::Corpus& gold,
                      const std::vector<std::vector<std::string>>& predicted) {
  check_alignment(gold, predicted);
  size_t total = 0, correct = 0;
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const auto& s = gold.sentences[i];
    if (s.is_document_start) continue;
    for (size_t t = 0; t < s.tokens.size(); ++t) {
      ++total;
      if (s.tokens[t].tag.value_or("O") == predicted[i][t]) ++correct;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / total;
}

PRF mention_detection_prf(const corpus::Corpus& gold,
                          const std::vector<std::vector<std::string>>& predicted) {
  if (gold.tagset_kind != corpus::TagsetKind::NER_BIO) {
    throw Error("mention_detection_prf requires BIO tags");
  }
  check_alignment(gold, predicted);
  std::map<std::string, PRF> counts;
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const auto& s = gold.sentences[i];
    if (s.is_document_start) continue;
    auto g = extract_spans(gold_tags(s));
    auto p = extract_spans(predicted[i]);
    // only predictions are filtered; gold MISC spans stay
    p.erase(std::remove_if(p.begin(), p.end(),
                           [](const Span& sp) { return sp.type == "MISC"; }),
            p.end());
    for (auto& sp : g) sp.type = "ENT";
    for (auto& sp : p) sp.type = "ENT";
    score_spans(std::move(g), std::move(p), counts);
  }
  return counts.count("ENT") ? counts["ENT"] : PRF{};
}

double scenario_average(double cased_score, double uncased_score) {
  return (cased_score + uncased_score) / 2.0;
}

std::string render_score(double value) {
  // half-up at two decimals; the tiny nudge absorbs binary representation
  // noise on exact .xx5 inputs
  const double cents = std::floor(value * 100.0 + 0.5 + 1e-9);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", cents / 100.0);
  return buf;
}

}  // namespace casekit::eval
