#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "casekit/casing.hpp"
#include "casekit/corpus.hpp"
#include "casekit/errors.hpp"
#include "casekit/rng.hpp"

using namespace casekit;
using casing::AugmentationStrategy;
using corpus::Corpus;
using corpus::Sentence;
using corpus::Token;

namespace {

std::string random_ascii(Rng& rng, size_t max_len = 20) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,-!";
  std::string s;
  const size_t n = rng.uniform_int(max_len + 1);
  for (size_t i = 0; i < n; ++i) {
    s.push_back(alphabet[rng.uniform_int(alphabet.size())]);
  }
  return s;
}

Corpus single_token_sentences(size_t n) {
  Corpus c;
  c.tagset_kind = corpus::TagsetKind::NER_BIO;
  for (size_t i = 0; i < n; ++i) {
    c.sentences.push_back(Sentence{{Token{"Word" + std::to_string(i), "O"}}, false});
  }
  return c;
}

}  // namespace

TEST_CASE("lowercase_text") {
  CHECK(casing::lowercase_text("Mr. Susulu") == "mr. susulu");
  CHECK(casing::lowercase_text("42 + 7") == "42 + 7");
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::string s = random_ascii(rng);
    CHECK(casing::lowercase_text(casing::lowercase_text(s)) ==
          casing::lowercase_text(s));
  }
}

TEST_CASE("extract_case_pattern") {
  CHECK(casing::extract_case_pattern("eBay") ==
        casing::CasePattern{false, true, false, false});
  CHECK(casing::extract_case_pattern("42") == casing::CasePattern{false, false});
  CHECK(casing::extract_case_pattern("USA") ==
        casing::CasePattern{true, true, true});
}

TEST_CASE("apply_case_pattern") {
  CHECK(casing::apply_case_pattern("ebay", {false, true, false, false}) == "eBay");
  CHECK(casing::apply_case_pattern("a1.", {true, true, true}) == "A1.");
  CHECK_THROWS_AS(casing::apply_case_pattern("abc", {true}), ContractViolation);
}

TEST_CASE("case pattern round-trip on the fixture alphabet") {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const std::string s = random_ascii(rng);
    CHECK(casing::apply_case_pattern(casing::lowercase_text(s),
                                     casing::extract_case_pattern(s)) == s);
  }
}

TEST_CASE("strategy CLI spellings") {
  CHECK(casing::parse_strategy("cased").kind == casing::StrategyKind::CASED);
  CHECK(casing::parse_strategy("uncased").kind == casing::StrategyKind::UNCASED);
  CHECK(casing::parse_strategy("c+u").kind == casing::StrategyKind::CASED_PLUS_UNCASED);
  const auto hm = casing::parse_strategy("half-mixed:0.25");
  CHECK(hm.kind == casing::StrategyKind::HALF_MIXED);
  CHECK(hm.mix_probability == doctest::Approx(0.25));
  CHECK(casing::parse_strategy("truecase-train").kind ==
        casing::StrategyKind::TRUECASE_TRAIN);
  CHECK_THROWS_AS(casing::parse_strategy("half-mixed:1.5"), ContractViolation);
  CHECK_THROWS_AS(casing::parse_strategy("wat"), ParseError);
}

TEST_CASE("cased-plus-uncased doubles in order") {
  Corpus c;
  c.tagset_kind = corpus::TagsetKind::NER_BIO;
  c.sentences.push_back(Sentence{{Token{"Alice", "B-PER"}}, false});
  c.sentences.push_back(Sentence{{Token{"Bob", "B-PER"}, Token{"ran", "O"}}, false});
  const auto out =
      casing::augment_corpus(c, AugmentationStrategy::cased_plus_uncased(), 0);
  REQUIRE(out.sentences.size() == 4);
  CHECK(out.sentences[0].tokens[0].surface == "Alice");
  CHECK(out.sentences[1].tokens[0].surface == "Bob");
  CHECK(out.sentences[2].tokens[0].surface == "alice");
  CHECK(out.sentences[3].tokens[0].surface == "bob");
  CHECK(*out.sentences[2].tokens[0].tag == "B-PER");
}

TEST_CASE("half-mixed boundaries") {
  const Corpus c = single_token_sentences(50);
  const auto p0 = casing::augment_corpus(c, AugmentationStrategy::half_mixed(0.0), 9);
  CHECK(p0 == c);
  const auto p1 = casing::augment_corpus(c, AugmentationStrategy::half_mixed(1.0), 9);
  CHECK(p1 == casing::augment_corpus(c, AugmentationStrategy::uncased(), 9));
}

TEST_CASE("half-mixed 0.5 concentrates near half") {
  const Corpus c = single_token_sentences(10000);
  const auto out = casing::augment_corpus(c, AugmentationStrategy::half_mixed(0.5), 7);
  // independent count of lowercased sentences
  size_t lowered = 0;
  for (size_t i = 0; i < out.sentences.size(); ++i) {
    if (out.sentences[i].tokens[0].surface != c.sentences[i].tokens[0].surface) {
      ++lowered;
    }
  }
  const double fraction = static_cast<double>(lowered) / 10000.0;
  CHECK(fraction >= 0.47);
  CHECK(fraction <= 0.53);
}

TEST_CASE("half-mixed is keyed by sentence index, not corpus order") {
  const Corpus c = single_token_sentences(100);
  const auto a = casing::augment_corpus(c, AugmentationStrategy::half_mixed(0.5), 11);
  const auto b = casing::augment_corpus(c, AugmentationStrategy::half_mixed(0.5), 11);
  CHECK(a == b);
}

TEST_CASE("strategies never touch tags") {
  Rng rng(23);
  Corpus c;
  c.tagset_kind = corpus::TagsetKind::NER_BIO;
  for (int i = 0; i < 30; ++i) {
    Sentence s;
    const size_t n = 1 + rng.uniform_int(5);
    for (size_t t = 0; t < n; ++t) {
      s.tokens.push_back(Token{"Tok" + std::to_string(rng.uniform_int(9)),
                               t == 0 ? "B-PER" : "O"});
    }
    c.sentences.push_back(std::move(s));
  }
  for (const auto& strat :
       {AugmentationStrategy::cased(), AugmentationStrategy::uncased(),
        AugmentationStrategy::half_mixed(0.5)}) {
    const auto out = casing::augment_corpus(c, strat, 3);
    REQUIRE(out.sentences.size() == c.sentences.size());
    for (size_t i = 0; i < out.sentences.size(); ++i) {
      REQUIRE(out.sentences[i].tokens.size() == c.sentences[i].tokens.size());
      for (size_t t = 0; t < out.sentences[i].tokens.size(); ++t) {
        CHECK(out.sentences[i].tokens[t].tag == c.sentences[i].tokens[t].tag);
      }
    }
  }
}

TEST_CASE("truecase-train strategy contracts") {
  const Corpus c = single_token_sentences(3);
  CHECK_THROWS_AS(
      casing::augment_corpus(c, AugmentationStrategy::truecase_train(), 0),
      ContractViolation);
  // a function that merges tokens must be rejected
  Corpus two;
  two.tagset_kind = corpus::TagsetKind::NER_BIO;
  two.sentences.push_back(Sentence{{Token{"a", "O"}, Token{"b", "O"}}, false});
  CHECK_THROWS_AS(
      casing::augment_corpus(two, AugmentationStrategy::truecase_train(), 0,
                             [](const std::string&) { return std::string("x"); }),
      Error);
  // identity truecasing lowercases the corpus
  const auto out = casing::augment_corpus(
      c, AugmentationStrategy::truecase_train(), 0,
      [](const std::string& s) { return s; });
  CHECK(out == casing::augment_corpus(c, AugmentationStrategy::uncased(), 0));
}

TEST_CASE("doc-start markers are preserved untouched") {
  Corpus c;
  c.tagset_kind = corpus::TagsetKind::NER_BIO;
  Sentence marker;
  marker.is_document_start = true;
  c.sentences.push_back(marker);
  c.sentences.push_back(Sentence{{Token{"Alice", "B-PER"}}, false});
  const auto out =
      casing::augment_corpus(c, AugmentationStrategy::cased_plus_uncased(), 0);
  CHECK(out.sentences.size() == 3);  // marker is not duplicated
  CHECK(out.sentences[0].is_document_start);
}
