#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "casekit/corpus.hpp"

namespace casekit::tagger {

struct TaggerModel {
  std::vector<std::string> labels;  // sorted lexicographically
  // per-feature weight vector indexed by label position; absent features
  // read as all-zero
  std::unordered_map<std::string, std::vector<double>> feature_weights;
  std::vector<double> transitions;  // L x L, row = previous label
  bool averaged = false;

  size_t label_count() const { return labels.size(); }
  double transition(size_t from, size_t to) const {
    return transitions[from * labels.size() + to];
  }
};

struct TaggerTrainConfig {
  size_t epochs = 5;
  uint64_t seed = 0;
  bool shuffle = true;
};

// Character-class word shape: uppercase -> X, lowercase -> x, digit -> d,
// anything else unchanged. The collapsed variant squeezes runs.
std::string word_shape(const std::string& surface, bool collapsed);

// Feature templates for one position; deterministic strings with template
// prefixes (w0=, shape=, ...).
std::vector<std::string> featurize(const corpus::Sentence& sentence,
                                   size_t position);

// Exact first-order argmax; ties break toward the earlier label at every
// argmax decision.
std::vector<std::string> viterbi_decode(const corpus::Sentence& sentence,
                                        const TaggerModel& model);

// Averaged structured perceptron. Deterministic in the seed; shuffling per
// epoch is keyed by (seed, epoch).
TaggerModel train_tagger(const corpus::Corpus& c, const TaggerTrainConfig& config);

// Decodes every non-marker sentence; marker sentences yield empty sequences.
std::vector<std::vector<std::string>> decode_corpus(const corpus::Corpus& c,
                                                    const TaggerModel& model);

std::string save_tagger(const TaggerModel& model);
TaggerModel load_tagger(const std::string& serialized);
void save_tagger_file(const TaggerModel& model, const std::string& path);
TaggerModel load_tagger_file(const std::string& path);

}  // namespace casekit::tagger
