#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "casekit/corpus.hpp"
#include "casekit/nn.hpp"

namespace casekit::truecaser {

// Character-to-id mapping over lowercased training characters.
// Ids 0 and 1 are reserved for PAD and UNK.
class CharVocab {
 public:
  static constexpr size_t kPad = 0;
  static constexpr size_t kUnk = 1;

  // Registers a character if absent; returns its id.
  size_t add(char32_t cp);
  size_t lookup(char32_t cp) const;  // kUnk for unknown characters
  bool contains(char32_t cp) const { return index_.count(cp) > 0; }
  size_t size() const { return chars_.size() + 2; }
  const std::vector<char32_t>& chars() const { return chars_; }

  bool operator==(const CharVocab& o) const { return chars_ == o.chars_; }

 private:
  std::vector<char32_t> chars_;  // chars_[k] has id k + 2
  std::unordered_map<char32_t, size_t> index_;
};

struct TruecaserModel {
  CharVocab vocab;
  nn::BilstmClassifier net;
  int format_version = 1;

  bool operator==(const TruecaserModel&) const = default;
};

struct TruecaserTrainConfig {
  size_t epochs = 10;
  size_t batch_size = 8;
  double lr = 1e-3;
  uint64_t seed = 0;
  size_t min_char_freq = 1;
  size_t embedding_dim = 16;
  size_t hidden_dim = 32;
  size_t num_layers = 2;
  double clip_norm = 5.0;
};

TruecaserTrainConfig parse_train_config(const std::string& json_text);

// Tokens joined by single spaces; the character stream the truecaser sees.
std::string sentence_text(const corpus::Sentence& s);

// Characters of the lowercased sentence texts with frequency >= cutoff get
// ids in first-appearance order after PAD/UNK. Space is a normal character.
CharVocab build_vocab(const corpus::Corpus& c, size_t min_char_freq);

// Lowercases, then maps each character to its id (UNK when absent).
std::vector<size_t> encode_chars(const std::string& text, const CharVocab& vocab);

struct TrainResult {
  TruecaserModel model;
  std::vector<double> epoch_losses;
};

// Supervision comes straight from the casing of the training text.
TrainResult train_truecaser(const corpus::Corpus& c,
                            const TruecaserTrainConfig& config);

// Lowercases the input, predicts a U/L label per character, and applies the
// predicted pattern. Character count is always preserved.
std::string truecase(const TruecaserModel& model, const std::string& text);

std::string save_model(const TruecaserModel& model);
TruecaserModel load_model(const std::string& serialized);

void save_model_file(const TruecaserModel& model, const std::string& path);
TruecaserModel load_model_file(const std::string& path);

}  // namespace casekit::truecaser
