#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace casekit::corpus {

enum class TagsetKind { NER_BIO, POS, PLAIN };

struct Token {
  std::string surface;             // non-empty, no whitespace
  std::optional<std::string> tag;  // absent for PLAIN corpora

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  bool is_document_start = false;

  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::vector<Sentence> sentences;
  TagsetKind tagset_kind = TagsetKind::PLAIN;

  bool operator==(const Corpus&) const = default;
};

struct FixtureSpec {
  uint64_t vocab_size = 50;
  uint64_t entity_lexicon_size = 12;
  uint64_t sentences = 2000;
  double cased_entity_rate = 1.0;
  uint64_t seed = 13;
  TagsetKind tagset_kind = TagsetKind::NER_BIO;  // NER_BIO or POS
};

// True when tag is `O` or `B-X`/`I-X` with non-empty X.
bool is_bio_tag(const std::string& tag);

// Parses whitespace-separated CoNLL columns, one token per line, sentences
// separated by blank lines. tag_column = -1 selects the last column of each
// line. Lines whose first column is `-DOCSTART-` become empty boundary-marker
// sentences. Tagset kind is inferred: NER_BIO when every tag parses as BIO,
// otherwise POS.
Corpus parse_conll(const std::string& text, int token_column = 0,
                   int tag_column = -1);

// Two-column output (surface, tag or `O` for untagged tokens); round-trips
// through parse_conll for tagged corpora.
std::string write_conll(const Corpus& c);

// One sentence per line, tokens split on runs of spaces/tabs, empty lines
// skipped. Result is PLAIN.
Corpus parse_plain(const std::string& text);

// Rewrites IOB1 tags to BIO2: an I-X opens a span (and becomes B-X) at
// sentence start, after O, or after a different type. Span set is unchanged.
Corpus convert_iob1_to_bio2(const Corpus& c);

// Deterministic synthetic corpus pair (80/20 train/test split by sentence).
// Entity words are a subset of the vocabulary; each entity lexicon entry is
// consistently capitalized in entity positions with probability
// cased_entity_rate, and entity mentions always follow a closed set of
// trigger words so the casing convention is learnable from context.
std::pair<Corpus, Corpus> generate_fixture(const FixtureSpec& spec);

// FixtureSpec from a JSON document with keys matching the field names;
// missing keys keep their defaults.
FixtureSpec parse_fixture_spec(const std::string& json_text);

std::string tagset_kind_name(TagsetKind k);

}  // namespace casekit::corpus
