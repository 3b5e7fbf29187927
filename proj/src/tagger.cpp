#include "casekit/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "casekit/casing.hpp"
#include "casekit/errors.hpp"
#include "casekit/rng.hpp"
#include "casekit/utf8.hpp"
#include "json.hpp"

namespace casekit::tagger {

std::string word_shape(const std::string& surface, bool collapsed) {
  const auto cps = utf8::decode(surface);
  std::string shape;
  for (char32_t cp : cps) {
    std::string sym;
    if (casing::is_upper(cp)) {
      sym = "X";
    } else if (casing::has_upper_variant(cp)) {
      sym = "x";
    } else if (cp >= U'0' && cp <= U'9') {
      sym = "d";
    } else {
      sym = utf8::encode_one(cp);
    }
    if (collapsed && !shape.empty()) {
      const size_t n = sym.size();
      if (shape.size() >= n && shape.compare(shape.size() - n, n, sym) == 0) {
        continue;
      }
    }
    shape += sym;
  }
  return shape;
}

std::vector<std::string> featurize(const corpus::Sentence& sentence,
                                   size_t position) {
  if (position >= sentence.tokens.size()) {
    throw ContractViolation("featurize: position out of range");
  }
  const std::string& orig = sentence.tokens[position].surface;
  const std::string lower = casing::lowercase_text(orig);

  std::vector<std::string> feats;
  feats.push_back("w0=" + lower);
  feats.push_back("orig=" + orig);
  feats.push_back(position == 0
                      ? "w-1=<BOS>"
                      : "w-1=" + casing::lowercase_text(
                                     sentence.tokens[position - 1].surface));
  feats.push_back(position + 1 == sentence.tokens.size()
                      ? "w+1=<EOS>"
                      : "w+1=" + casing::lowercase_text(
                                     sentence.tokens[position + 1].surface));
  feats.push_back("shape=" + word_shape(orig, false));
  feats.push_back("cshape=" + word_shape(orig, true));

  const auto cps = utf8::decode(lower);
  for (size_t k = 1; k <= 3 && k <= cps.size(); ++k) {
    feats.push_back("p" + std::to_string(k) + "=" +
                    utf8::encode({cps.begin(), cps.begin() + k}));
    feats.push_back("s" + std::to_string(k) + "=" +
                    utf8::encode({cps.end() - k, cps.end()}));
  }

  if (position == 0) feats.push_back("first=1");
  const auto orig_cps = utf8::decode(orig);
  feats.push_back(!orig_cps.empty() && casing::is_upper(orig_cps[0]) ? "cap=1"
                                                                    : "cap=0");
  bool all_caps = !orig_cps.empty();
  bool has_digit = false;
  for (char32_t cp : orig_cps) {
    if (!casing::is_upper(cp)) all_caps = false;
    if (cp >= U'0' && cp <= U'9') has_digit = true;
  }
  if (all_caps) feats.push_back("allcaps=1");
  if (has_digit) feats.push_back("hasdigit=1");
  return feats;
}

namespace {

// emission scores for one position under the current weights
void emission_scores(const TaggerModel& model,
                     const std::vector<std::string>& feats,
                     std::vector<double>& out) {
  out.assign(model.labels.size(), 0.0);
  for (const auto& f : feats) {
    auto it = model.feature_weights.find(f);
    if (it == model.feature_weights.end()) continue;
    for (size_t y = 0; y < out.size(); ++y) out[y] += it->second[y];
  }
}

std::vector<size_t> viterbi_ids(const std::vector<std::vector<double>>& emissions,
                                const TaggerModel& model) {
  const size_t n = emissions.size();
  const size_t L = model.labels.size();
  std::vector<std::vector<double>> score(n, std::vector<double>(L));
  std::vector<std::vector<size_t>> back(n, std::vector<size_t>(L, 0));
  score[0] = emissions[0];
  for (size_t t = 1; t < n; ++t) {
    for (size_t y = 0; y < L; ++y) {
      double best = score[t - 1][0] + model.transition(0, y);
      size_t best_prev = 0;
      for (size_t p = 1; p < L; ++p) {
        const double s = score[t - 1][p] + model.transition(p, y);
        if (s > best) {
          best = s;
          best_prev = p;
        }
      }
      score[t][y] = best + emissions[t][y];
      back[t][y] = best_prev;
    }
  }
  size_t best_last = 0;
  for (size_t y = 1; y < L; ++y) {
    if (score[n - 1][y] > score[n - 1][best_last]) best_last = y;
  }
  std::vector<size_t> path(n);
  path[n - 1] = best_last;
  for (size_t t = n - 1; t > 0; --t) path[t - 1] = back[t][path[t]];
  return path;
}

}  // namespace

std::vector<std::string> viterbi_decode(const corpus::Sentence& sentence,
                                        const TaggerModel& model) {
  if (sentence.tokens.empty()) {
    throw ContractViolation("viterbi_decode: empty sentence");
  }
  if (model.labels.empty()) {
    throw ContractViolation("viterbi_decode: empty label set");
  }
  std::vector<std::vector<double>> emissions(sentence.tokens.size());
  for (size_t t = 0; t < sentence.tokens.size(); ++t) {
    emission_scores(model, featurize(sentence, t), emissions[t]);
  }
  const auto path = viterbi_ids(emissions, model);
  std::vector<std::string> out;
  out.reserve(path.size());
  for (size_t y : path) out.push_back(model.labels[y]);
  return out;
}

TaggerModel train_tagger(const corpus::Corpus& c, const TaggerTrainConfig& config) {
  if (c.tagset_kind == corpus::TagsetKind::PLAIN) {
    throw ContractViolation("train_tagger: corpus is untagged");
  }
  if (config.epochs == 0) throw ContractViolation("train_tagger: epochs must be >= 1");

  std::set<std::string> label_set;
  std::vector<const corpus::Sentence*> sentences;
  for (const auto& s : c.sentences) {
    if (s.is_document_start || s.tokens.empty()) continue;
    for (const auto& t : s.tokens) {
      if (!t.tag) throw ContractViolation("train_tagger: token without a tag");
      label_set.insert(*t.tag);
    }
    sentences.push_back(&s);
  }
  if (sentences.empty()) throw ContractViolation("train_tagger: empty corpus");

  TaggerModel model;
  model.labels.assign(label_set.begin(), label_set.end());
  const size_t L = model.labels.size();
  model.transitions.assign(L * L, 0.0);
  std::unordered_map<std::string, size_t> label_id;
  for (size_t y = 0; y < L; ++y) label_id[model.labels[y]] = y;

  // averaging accumulators: avg = w - u / updates_seen
  std::unordered_map<std::string, std::vector<double>> feature_acc;
  std::vector<double> transition_acc(L * L, 0.0);
  double step = 1.0;

  // feature sets are label-independent, so compute them once
  std::vector<std::vector<std::vector<std::string>>> all_feats(sentences.size());
  std::vector<std::vector<size_t>> gold_ids(sentences.size());
  for (size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = *sentences[i];
    all_feats[i].resize(s.tokens.size());
    gold_ids[i].resize(s.tokens.size());
    for (size_t t = 0; t < s.tokens.size(); ++t) {
      all_feats[i][t] = featurize(s, t);
      gold_ids[i][t] = label_id.at(*s.tokens[t].tag);
    }
  }

  auto bump_feature = [&](const std::string& f, size_t y, double d) {
    auto& w = model.feature_weights[f];
    if (w.empty()) w.assign(L, 0.0);
    auto& u = feature_acc[f];
    if (u.empty()) u.assign(L, 0.0);
    w[y] += d;
    u[y] += step * d;
  };

  std::vector<size_t> order(sentences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) Rng(config.seed, epoch).shuffle(order);
    for (size_t i : order) {
      const auto& feats = all_feats[i];
      const auto& gold = gold_ids[i];
      const size_t n = feats.size();
      std::vector<std::vector<double>> emissions(n);
      for (size_t t = 0; t < n; ++t) {
        emission_scores(model, feats[t], emissions[t]);
      }
      const auto predicted = viterbi_ids(emissions, model);
      if (predicted != gold) {
        for (size_t t = 0; t < n; ++t) {
          if (predicted[t] == gold[t]) continue;
          for (const auto& f : feats[t]) {
            bump_feature(f, gold[t], 1.0);
            bump_feature(f, predicted[t], -1.0);
          }
        }
        for (size_t t = 1; t < n; ++t) {
          const size_t gi = gold[t - 1] * L + gold[t];
          const size_t pi = predicted[t - 1] * L + predicted[t];
          if (gi == pi) continue;
          model.transitions[gi] += 1.0;
          transition_acc[gi] += step;
          model.transitions[pi] -= 1.0;
          transition_acc[pi] -= step;
        }
      }
      step += 1.0;
    }
  }

  // finalize the running average
  for (auto& [f, w] : model.feature_weights) {
    const auto& u = feature_acc[f];
    for (size_t y = 0; y < L; ++y) w[y] -= u[y] / step;
  }
  for (size_t i = 0; i < model.transitions.size(); ++i) {
    model.transitions[i] -= transition_acc[i] / step;
  }
  model.averaged = true;
  return model;
}

std::vector<std::vector<std::string>> decode_corpus(const corpus::Corpus& c,
                                                    const TaggerModel& model) {
  std::vector<std::vector<std::string>> out;
  out.reserve(c.sentences.size());
  for (const auto& s : c.sentences) {
    if (s.is_document_start || s.tokens.empty()) {
      out.emplace_back();
    } else {
      out.push_back(viterbi_decode(s, model));
    }
  }
  return out;
}

std::string save_tagger(const TaggerModel& model) {
  nlohmann::json j;
  j["labels"] = model.labels;
  j["averaged"] = model.averaged;
  nlohmann::json feats = nlohmann::json::array();
  std::map<std::string, const std::vector<double>*> ordered;
  for (const auto& [f, w] : model.feature_weights) ordered[f] = &w;
  for (const auto& [f, w] : ordered) {
    for (size_t y = 0; y < model.labels.size(); ++y) {
      if ((*w)[y] != 0.0) feats.push_back({f, model.labels[y], (*w)[y]});
    }
  }
  j["features"] = std::move(feats);
  nlohmann::json trans = nlohmann::json::array();
  for (size_t p = 0; p < model.labels.size(); ++p) {
    for (size_t y = 0; y < model.labels.size(); ++y) {
      const double v = model.transition(p, y);
      if (v != 0.0) trans.push_back({model.labels[p], model.labels[y], v});
    }
  }
  j["transitions"] = std::move(trans);
  return j.dump();
}

TaggerModel load_tagger(const std::string& serialized) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(serialized);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptModelError(std::string("tagger document does not parse: ") + e.what());
  }
  TaggerModel model;
  try {
    model.labels = j.at("labels").get<std::vector<std::string>>();
    model.averaged = j.value("averaged", false);
    const size_t L = model.labels.size();
    std::unordered_map<std::string, size_t> label_id;
    for (size_t y = 0; y < L; ++y) label_id[model.labels[y]] = y;
    model.transitions.assign(L * L, 0.0);
    for (const auto& e : j.at("features")) {
      auto& w = model.feature_weights[e.at(0).get<std::string>()];
      if (w.empty()) w.assign(L, 0.0);
      w[label_id.at(e.at(1).get<std::string>())] = e.at(2).get<double>();
    }
    for (const auto& e : j.at("transitions")) {
      const size_t p = label_id.at(e.at(0).get<std::string>());
      const size_t y = label_id.at(e.at(1).get<std::string>());
      model.transitions[p * L + y] = e.at(2).get<double>();
    }
  } catch (const std::out_of_range&) {
    throw CorruptModelError("tagger document references an unknown label");
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModelError(std::string("tagger document is malformed: ") + e.what());
  }
  return model;
}

void save_tagger_file(const TaggerModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << save_tagger(model);
}

TaggerModel load_tagger_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_tagger(ss.str());
}

}  // namespace casekit::tagger
