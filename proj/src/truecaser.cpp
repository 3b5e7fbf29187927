#include "casekit/truecaser.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "casekit/casing.hpp"
#include "casekit/errors.hpp"
#include "casekit/rng.hpp"
#include "casekit/utf8.hpp"
#include "json.hpp"

namespace casekit::truecaser {

size_t CharVocab::add(char32_t cp) {
  auto it = index_.find(cp);
  if (it != index_.end()) return it->second;
  const size_t id = chars_.size() + 2;
  chars_.push_back(cp);
  index_.emplace(cp, id);
  return id;
}

size_t CharVocab::lookup(char32_t cp) const {
  auto it = index_.find(cp);
  return it == index_.end() ? kUnk : it->second;
}

std::string sentence_text(const corpus::Sentence& s) {
  std::string text;
  for (size_t i = 0; i < s.tokens.size(); ++i) {
    if (i) text += ' ';
    text += s.tokens[i].surface;
  }
  return text;
}

CharVocab build_vocab(const corpus::Corpus& c, size_t min_char_freq) {
  std::unordered_map<char32_t, size_t> freq;
  std::vector<std::vector<char32_t>> texts;
  for (const auto& s : c.sentences) {
    if (s.is_document_start || s.tokens.empty()) continue;
    auto cps = utf8::decode(casing::lowercase_text(sentence_text(s)));
    for (char32_t cp : cps) ++freq[cp];
    texts.push_back(std::move(cps));
  }
  CharVocab vocab;
  for (const auto& cps : texts) {
    for (char32_t cp : cps) {
      if (freq[cp] >= min_char_freq && !vocab.contains(cp)) vocab.add(cp);
    }
  }
  return vocab;
}

std::vector<size_t> encode_chars(const std::string& text, const CharVocab& vocab) {
  const auto cps = utf8::decode(casing::lowercase_text(text));
  std::vector<size_t> ids;
  ids.reserve(cps.size());
  for (char32_t cp : cps) ids.push_back(vocab.lookup(cp));
  return ids;
}

TrainResult train_truecaser(const corpus::Corpus& c,
                            const TruecaserTrainConfig& config) {
  struct Example {
    std::vector<size_t> ids;
    std::vector<int> labels;
  };

  CharVocab vocab = build_vocab(c, config.min_char_freq);
  std::vector<Example> examples;
  for (const auto& s : c.sentences) {
    if (s.is_document_start || s.tokens.empty()) continue;
    const std::string text = sentence_text(s);
    Example ex;
    ex.ids = encode_chars(text, vocab);
    const auto pattern = casing::extract_case_pattern(text);
    ex.labels.reserve(pattern.size());
    for (bool u : pattern) ex.labels.push_back(u ? 1 : 0);
    examples.push_back(std::move(ex));
  }
  if (examples.empty()) throw ContractViolation("train_truecaser: empty corpus");

  // batches of length-sorted sentences, stable so runs are reproducible
  std::vector<size_t> order(examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return examples[a].ids.size() < examples[b].ids.size();
  });
  std::vector<std::vector<size_t>> batches;
  for (size_t i = 0; i < order.size(); i += config.batch_size) {
    const size_t end = std::min(i + config.batch_size, order.size());
    batches.emplace_back(order.begin() + i, order.begin() + end);
  }

  TrainResult result;
  result.model.vocab = std::move(vocab);
  result.model.net =
      nn::init_classifier(result.model.vocab.size(), config.embedding_dim,
                          config.hidden_dim, config.num_layers, config.seed);
  nn::BilstmClassifier& net = result.model.net;
  nn::ParamView params = nn::flatten(net);
  nn::AdamState adam;
  adam.config.lr = config.lr;
  adam.config.clip_norm = config.clip_norm;

  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<size_t> batch_order(batches.size());
    for (size_t i = 0; i < batch_order.size(); ++i) batch_order[i] = i;
    Rng(config.seed, 0xE70C + epoch).shuffle(batch_order);

    double epoch_loss = 0.0;
    size_t epoch_positions = 0;
    for (size_t bi : batch_order) {
      nn::BilstmClassifier grads = nn::zeros_like(net);
      double batch_loss = 0.0;
      size_t batch_positions = 0;
      for (size_t ei : batches[bi]) {
        const auto& ex = examples[ei];
        if (ex.ids.empty()) continue;
        auto [loss, positions] =
            nn::sequence_loss_and_grads(net, ex.ids, ex.labels, grads);
        batch_loss += loss;
        batch_positions += positions;
      }
      if (batch_positions == 0) continue;
      if (!std::isfinite(batch_loss)) {
        throw Error("non-finite loss at epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(bi));
      }
      nn::scale_params(grads, 1.0 / static_cast<double>(batch_positions));
      nn::adam_step(params, nn::to_flat(grads), adam);
      epoch_loss += batch_loss;
      epoch_positions += batch_positions;
    }
    result.epoch_losses.push_back(
        epoch_positions ? epoch_loss / static_cast<double>(epoch_positions) : 0.0);
  }
  return result;
}

std::string truecase(const TruecaserModel& model, const std::string& text) {
  if (text.empty()) return "";
  const std::string lower = casing::lowercase_text(text);
  const auto ids = encode_chars(lower, model.vocab);
  const auto logits = nn::forward_logits(model.net, ids);
  casing::CasePattern pattern;
  pattern.reserve(logits.size());
  // sigmoid(z) > 0.5 iff z > 0; ties resolve to L
  for (double z : logits) pattern.push_back(z > 0.0);
  return casing::apply_case_pattern(lower, pattern);
}

namespace {

nlohmann::json tensor_to_json(const nn::Tensor2& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (size_t r = 0; r < t.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (size_t c = 0; c < t.cols; ++c) row.push_back(t.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nn::Tensor2 tensor_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw CorruptModelError("tensor is not an array");
  const size_t rows = j.size();
  size_t cols = 0;
  if (rows > 0) cols = j[0].size();
  nn::Tensor2 t(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw DimensionError("ragged tensor rows");
    for (size_t c = 0; c < cols; ++c) t.at(r, c) = j[r][c].get<double>();
  }
  return t;
}

nlohmann::json cell_to_json(const nn::LstmCellParams& p) {
  return {{"input_weights", tensor_to_json(p.input_weights)},
          {"recurrent_weights", tensor_to_json(p.recurrent_weights)},
          {"bias", p.bias}};
}

nn::LstmCellParams cell_from_json(const nlohmann::json& j) {
  nn::LstmCellParams p;
  p.input_weights = tensor_from_json(j.at("input_weights"));
  p.recurrent_weights = tensor_from_json(j.at("recurrent_weights"));
  p.bias = j.at("bias").get<nn::Vec>();
  const size_t h = p.recurrent_weights.cols;
  if (p.input_weights.rows != 4 * h || p.recurrent_weights.rows != 4 * h ||
      p.bias.size() != 4 * h) {
    throw DimensionError("LSTM cell dimensions are inconsistent");
  }
  return p;
}

constexpr int kFormatVersion = 1;

}  // namespace

std::string save_model(const TruecaserModel& model) {
  nlohmann::json j;
  j["format_version"] = model.format_version;
  j["embedding_dim"] = model.net.embedding_dim();
  j["hidden_dim"] = model.net.hidden_dim();
  j["num_layers"] = model.net.layers.size();
  nlohmann::json vocab = nlohmann::json::array();
  for (size_t k = 0; k < model.vocab.chars().size(); ++k) {
    vocab.push_back({utf8::encode_one(model.vocab.chars()[k]), k + 2});
  }
  j["vocab"] = std::move(vocab);
  j["embedding"] = tensor_to_json(model.net.embedding);
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : model.net.layers) {
    layers.push_back({{"forward", cell_to_json(layer.forward)},
                      {"backward", cell_to_json(layer.backward)}});
  }
  j["layers"] = std::move(layers);
  nlohmann::json head_w = nlohmann::json::array();
  for (double v : model.net.head_weight.values) head_w.push_back(v);
  j["head_weight"] = std::move(head_w);
  j["head_bias"] = model.net.head_bias;
  return j.dump();
}

TruecaserModel load_model(const std::string& serialized) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(serialized);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptModelError(std::string("model document does not parse: ") + e.what());
  }
  TruecaserModel model;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw VersionMismatchError("unsupported model format_version " +
                                 std::to_string(version));
    }
    model.format_version = version;
    const size_t edim = j.at("embedding_dim").get<size_t>();
    const size_t hdim = j.at("hidden_dim").get<size_t>();
    const size_t nlayers = j.at("num_layers").get<size_t>();

    size_t expected_id = 2;
    for (const auto& entry : j.at("vocab")) {
      const auto cps = utf8::decode(entry.at(0).get<std::string>());
      if (cps.size() != 1) throw CorruptModelError("vocab entry is not one character");
      if (entry.at(1).get<size_t>() != expected_id) {
        throw CorruptModelError("vocab ids are not contiguous");
      }
      model.vocab.add(cps[0]);
      ++expected_id;
    }

    model.net.embedding = tensor_from_json(j.at("embedding"));
    if (model.net.embedding.rows != model.vocab.size() ||
        model.net.embedding.cols != edim) {
      throw DimensionError("embedding shape disagrees with vocab/config");
    }
    for (const auto& lj : j.at("layers")) {
      nn::BiLayerParams layer;
      layer.forward = cell_from_json(lj.at("forward"));
      layer.backward = cell_from_json(lj.at("backward"));
      model.net.layers.push_back(std::move(layer));
    }
    if (model.net.layers.size() != nlayers) {
      throw DimensionError("layer count disagrees with num_layers");
    }
    for (size_t l = 0; l < model.net.layers.size(); ++l) {
      const size_t expected_in = l == 0 ? edim : 2 * hdim;
      if (model.net.layers[l].forward.input_size() != expected_in ||
          model.net.layers[l].backward.input_size() != expected_in ||
          model.net.layers[l].forward.hidden_size() != hdim ||
          model.net.layers[l].backward.hidden_size() != hdim) {
        throw DimensionError("layer " + std::to_string(l) + " dimensions do not chain");
      }
    }
    model.net.head_weight = nn::Tensor2(1, 2 * hdim);
    const auto& hw = j.at("head_weight");
    if (hw.size() != 2 * hdim) throw DimensionError("head weight size mismatch");
    for (size_t i = 0; i < hw.size(); ++i) {
      model.net.head_weight.values[i] = hw[i].get<double>();
    }
    model.net.head_bias = j.at("head_bias").get<double>();
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModelError(std::string("model document is malformed: ") + e.what());
  }
  return model;
}

void save_model_file(const TruecaserModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << save_model(model);
}

TruecaserModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

TruecaserTrainConfig parse_train_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("train config: ") + e.what());
  }
  TruecaserTrainConfig cfg;
  if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<size_t>();
  if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<size_t>();
  if (j.contains("lr")) cfg.lr = j.at("lr").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("min_char_freq")) cfg.min_char_freq = j.at("min_char_freq").get<size_t>();
  if (j.contains("embedding_dim")) cfg.embedding_dim = j.at("embedding_dim").get<size_t>();
  if (j.contains("hidden_dim")) cfg.hidden_dim = j.at("hidden_dim").get<size_t>();
  if (j.contains("num_layers")) cfg.num_layers = j.at("num_layers").get<size_t>();
  if (j.contains("clip_norm")) cfg.clip_norm = j.at("clip_norm").get<double>();
  if (cfg.epochs == 0 || cfg.batch_size == 0 || cfg.lr <= 0.0 ||
      cfg.embedding_dim == 0 || cfg.hidden_dim == 0 || cfg.num_layers == 0) {
    throw ContractViolation("train config values must be positive");
  }
  return cfg;
}

}  // namespace casekit::truecaser
