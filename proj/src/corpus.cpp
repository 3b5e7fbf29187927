#include "casekit/corpus.hpp"

#include <algorithm>
#include <sstream>

#include "casekit/errors.hpp"
#include "casekit/rng.hpp"
#include "json.hpp"

namespace casekit::corpus {

namespace {

std::vector<std::string> split_columns(const std::string& line) {
  std::vector<std::string> cols;
  size_t i = 0;
  const size_t n = line.size();
  while (i < n) {
    while (i < n && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < n && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) cols.push_back(line.substr(start, i - start));
  }
  return cols;
}

bool is_blank(const std::string& line) {
  return split_columns(line).empty();
}

}  // namespace

bool is_bio_tag(const std::string& tag) {
  if (tag == "O") return true;
  if (tag.size() < 3) return false;
  if (tag[0] != 'B' && tag[0] != 'I') return false;
  return tag[1] == '-';
}

std::string tagset_kind_name(TagsetKind k) {
  switch (k) {
    case TagsetKind::NER_BIO: return "NER_BIO";
    case TagsetKind::POS: return "POS";
    case TagsetKind::PLAIN: return "PLAIN";
  }
  return "?";
}

Corpus parse_conll(const std::string& text, int token_column, int tag_column) {
  Corpus out;
  Sentence current;
  bool any_tag = false;
  bool all_bio = true;

  auto flush = [&] {
    if (!current.tokens.empty()) {
      out.sentences.push_back(std::move(current));
      current = Sentence{};
    }
  };

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) {
      flush();
      continue;
    }
    const auto cols = split_columns(line);
    if (cols[0] == "-DOCSTART-") {
      flush();
      Sentence marker;
      marker.is_document_start = true;
      out.sentences.push_back(std::move(marker));
      continue;
    }
    const int resolved_tag =
        tag_column < 0 ? static_cast<int>(cols.size()) - 1 : tag_column;
    const int needed = std::max(token_column, resolved_tag);
    if (static_cast<int>(cols.size()) <= needed) {
      throw ParseError("line " + std::to_string(line_no) + ": expected at least " +
                       std::to_string(needed + 1) + " columns, got " +
                       std::to_string(cols.size()));
    }
    Token tok;
    tok.surface = cols[static_cast<size_t>(token_column)];
    if (resolved_tag != token_column) {
      tok.tag = cols[static_cast<size_t>(resolved_tag)];
      any_tag = true;
      if (!is_bio_tag(*tok.tag)) all_bio = false;
    }
    current.tokens.push_back(std::move(tok));
  }
  flush();

  if (!any_tag) {
    bool has_tokens = std::any_of(out.sentences.begin(), out.sentences.end(),
                                  [](const Sentence& s) { return !s.tokens.empty(); });
    out.tagset_kind = has_tokens ? TagsetKind::PLAIN : TagsetKind::NER_BIO;
  } else {
    out.tagset_kind = all_bio ? TagsetKind::NER_BIO : TagsetKind::POS;
  }
  return out;
}

std::string write_conll(const Corpus& c) {
  std::string out;
  for (const auto& s : c.sentences) {
    if (s.is_document_start) {
      out += "-DOCSTART- O\n\n";
      continue;
    }
    for (const auto& t : s.tokens) {
      out += t.surface;
      out += ' ';
      out += t.tag ? *t.tag : "O";
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

Corpus parse_plain(const std::string& text) {
  Corpus out;
  out.tagset_kind = TagsetKind::PLAIN;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto cols = split_columns(line);
    if (cols.empty()) continue;
    Sentence s;
    for (const auto& w : cols) s.tokens.push_back(Token{w, std::nullopt});
    out.sentences.push_back(std::move(s));
  }
  return out;
}

Corpus convert_iob1_to_bio2(const Corpus& c) {
  if (c.tagset_kind != TagsetKind::NER_BIO) {
    throw ContractViolation("convert_iob1_to_bio2 requires an NER_BIO corpus");
  }
  Corpus out = c;
  for (auto& s : out.sentences) {
    std::string prev = "O";
    for (auto& t : s.tokens) {
      std::string tag = t.tag.value_or("O");
      if (tag.size() > 2 && tag[0] == 'I') {
        const std::string type = tag.substr(2);
        const bool continues = prev.size() > 2 && prev.substr(2) == type &&
                               (prev[0] == 'B' || prev[0] == 'I');
        if (!continues) tag = "B-" + type;
      }
      prev = t.tag.value_or("O");
      t.tag = tag;
    }
  }
  return out;
}

namespace {

const std::vector<std::string> kTriggerWords = {"in", "at", "of", "by"};

std::string random_word(Rng& rng) {
  const size_t len = 3 + static_cast<size_t>(rng.uniform_int(5));
  std::string w;
  for (size_t i = 0; i < len; ++i) {
    w.push_back(static_cast<char>('a' + rng.uniform_int(26)));
  }
  return w;
}

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 32);
  return w;
}

}  // namespace

std::pair<Corpus, Corpus> generate_fixture(const FixtureSpec& spec) {
  if (spec.vocab_size < 1 || spec.entity_lexicon_size < 1 || spec.sentences < 1) {
    throw ContractViolation("fixture sizes must be >= 1");
  }
  if (spec.cased_entity_rate < 0.0 || spec.cased_entity_rate > 1.0) {
    throw ContractViolation("cased_entity_rate must lie in [0,1]");
  }
  if (spec.vocab_size < spec.entity_lexicon_size) {
    throw ContractViolation("vocab smaller than entity lexicon");
  }
  if (spec.tagset_kind == TagsetKind::PLAIN) {
    throw ContractViolation("fixture tagset kind must be NER_BIO or POS");
  }

  Rng rng(spec.seed, 0xF1A7);

  std::vector<std::string> vocab;
  vocab.reserve(spec.vocab_size);
  while (vocab.size() < spec.vocab_size) {
    std::string w = random_word(rng);
    if (std::find(vocab.begin(), vocab.end(), w) == vocab.end()) {
      vocab.push_back(std::move(w));
    }
  }
  // Entity lexicon is a subset of the vocabulary: the same word occurs both
  // as an ordinary lowercase token and (after a trigger) as an entity, so
  // capitalization is the only token-local cue that separates the two roles.
  const size_t ents = spec.entity_lexicon_size;
  std::vector<bool> entity_cased(ents);
  for (size_t i = 0; i < ents; ++i) {
    entity_cased[i] = rng.bernoulli(spec.cased_entity_rate);
  }

  const bool ner = spec.tagset_kind == TagsetKind::NER_BIO;
  const std::string common_tag = ner ? "O" : "NN";

  Corpus train, test;
  train.tagset_kind = spec.tagset_kind;
  test.tagset_kind = spec.tagset_kind;

  for (uint64_t si = 0; si < spec.sentences; ++si) {
    Sentence s;
    auto push_common = [&] {
      const auto& w = vocab[rng.uniform_int(vocab.size())];
      s.tokens.push_back(Token{w, common_tag});
    };
    const size_t lead = 2 + rng.uniform_int(4);
    for (size_t i = 0; i < lead; ++i) push_common();
    if (rng.bernoulli(0.75)) {
      const size_t ti = rng.uniform_int(kTriggerWords.size());
      s.tokens.push_back(Token{kTriggerWords[ti], common_tag});
      // exactly one entity token per trigger, so both the casing and the tags
      // of a sentence are fully determined by its lowercased text
      const size_t span = 1;
      for (size_t k = 0; k < span; ++k) {
        const size_t e = rng.uniform_int(ents);
        std::string surface = vocab[e];
        if (entity_cased[e]) surface = capitalize(surface);
        std::string tag = ner ? (k == 0 ? "B-ENT" : "I-ENT") : "NNP";
        s.tokens.push_back(Token{std::move(surface), std::move(tag)});
      }
      const size_t tail = rng.uniform_int(3);
      for (size_t i = 0; i < tail; ++i) push_common();
    }
    s.tokens.push_back(Token{".", common_tag});
    if (si % 5 == 4) {
      test.sentences.push_back(std::move(s));
    } else {
      train.sentences.push_back(std::move(s));
    }
  }
  return {std::move(train), std::move(test)};
}

FixtureSpec parse_fixture_spec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("fixture spec: ") + e.what());
  }
  FixtureSpec spec;
  if (j.contains("vocab_size")) spec.vocab_size = j.at("vocab_size").get<uint64_t>();
  if (j.contains("entity_lexicon_size")) {
    spec.entity_lexicon_size = j.at("entity_lexicon_size").get<uint64_t>();
  }
  if (j.contains("sentences")) spec.sentences = j.at("sentences").get<uint64_t>();
  if (j.contains("cased_entity_rate")) {
    spec.cased_entity_rate = j.at("cased_entity_rate").get<double>();
  }
  if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
  if (j.contains("tagset_kind")) {
    const std::string k = j.at("tagset_kind").get<std::string>();
    if (k == "NER_BIO") {
      spec.tagset_kind = TagsetKind::NER_BIO;
    } else if (k == "POS") {
      spec.tagset_kind = TagsetKind::POS;
    } else {
      throw ParseError("fixture spec: unknown tagset_kind '" + k + "'");
    }
  }
  return spec;
}

}  // namespace casekit::corpus
