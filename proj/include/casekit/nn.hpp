#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace casekit::nn {

using Vec = std::vector<double>;

struct Tensor2 {
  size_t rows = 0;
  size_t cols = 0;
  Vec values;  // row-major

  Tensor2() = default;
  Tensor2(size_t r, size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(size_t r, size_t c) { return values[r * cols + c]; }
  double at(size_t r, size_t c) const { return values[r * cols + c]; }

  bool operator==(const Tensor2&) const = default;
};

// Gate order is fixed as [input, forget, cell, output], stacked along the
// 4H rows of each weight matrix. Serialized models rely on this order.
struct LstmCellParams {
  Tensor2 input_weights;      // 4H x E
  Tensor2 recurrent_weights;  // 4H x H
  Vec bias;                   // 4H

  size_t hidden_size() const { return recurrent_weights.cols; }
  size_t input_size() const { return input_weights.cols; }

  bool operator==(const LstmCellParams&) const = default;
};

struct BiLayerParams {
  LstmCellParams forward;
  LstmCellParams backward;

  bool operator==(const BiLayerParams&) const = default;
};

// One LSTM cell update: i,f,o = sigmoid(gates), g = tanh(gate),
// c = f*c_prev + i*g, h = o*tanh(c).
void lstm_cell_step(const Vec& x, const Vec& h_prev, const Vec& c_prev,
                    const LstmCellParams& params, Vec& h_out, Vec& c_out);

// Stacked bidirectional encoder from zero initial states; output per
// position is [forward_h; backward_h] of the last layer.
std::vector<Vec> bilstm_encode(const std::vector<Vec>& inputs,
                               const std::vector<BiLayerParams>& layers);

// logit_t = weight . input_t + bias
Vec linear_logits(const std::vector<Vec>& inputs, const Tensor2& weight,
                  double bias);

// Numerically stable binary cross-entropy with logits, averaged over masked
// positions; 0 when the mask selects nothing.
double bce_with_logits(const Vec& logits, const std::vector<int>& labels,
                       const std::vector<int>& mask);

// Embedding -> stacked BiLSTM -> scalar logit per position. Doubles as its
// own gradient container (gradients share every shape).
struct BilstmClassifier {
  Tensor2 embedding;  // V x E
  std::vector<BiLayerParams> layers;
  Tensor2 head_weight;  // 1 x 2H
  double head_bias = 0.0;

  size_t vocab_size() const { return embedding.rows; }
  size_t embedding_dim() const { return embedding.cols; }
  size_t hidden_dim() const {
    return layers.empty() ? 0 : layers[0].forward.hidden_size();
  }

  bool operator==(const BilstmClassifier&) const = default;
};

// Random initialization: input/recurrent weights uniform in
// [-sqrt(1/H), sqrt(1/H)], biases zero except forget-gate bias 1.0,
// embedding uniform in [-0.1, 0.1], head uniform in [-sqrt(1/2H), sqrt(1/2H)].
BilstmClassifier init_classifier(size_t vocab, size_t embedding_dim,
                                 size_t hidden_dim, size_t num_layers,
                                 uint64_t seed);

BilstmClassifier zeros_like(const BilstmClassifier& m);

Vec forward_logits(const BilstmClassifier& model,
                   const std::vector<size_t>& ids);

// Forward + exact BPTT for one sequence. Accumulates into `grads` the
// gradient of the SUM of per-position BCE losses (callers scale to a batch
// mean afterwards) and returns (sum_loss, positions).
std::pair<double, size_t> sequence_loss_and_grads(
    const BilstmClassifier& model, const std::vector<size_t>& ids,
    const std::vector<int>& labels, BilstmClassifier& grads);

void scale_params(BilstmClassifier& m, double factor);

// Flat non-owning view over all trainable scalars, in a fixed documented
// order (embedding, then per layer fwd Wi/Wr/b then bwd Wi/Wr/b, then head
// weight and bias). Segments carry names for diagnostics.
struct ParamView {
  std::vector<double*> ptrs;
  std::vector<std::pair<size_t, std::string>> segments;  // (start offset, name)

  size_t size() const { return ptrs.size(); }
  const std::string& segment_name(size_t flat_index) const;
};

ParamView flatten(BilstmClassifier& m);
Vec to_flat(const BilstmClassifier& m);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.0;  // 0 disables global gradient-norm clipping
};

struct AdamState {
  Vec first_moment;
  Vec second_moment;
  uint64_t step_count = 0;
  AdamConfig config;
};

// Standard Adam with bias correction; clips the global gradient norm first
// when configured. Throws on non-finite gradients, naming the parameter.
void adam_step(ParamView& params, Vec grads, AdamState& state);

// Central-difference check of `analytic` against `loss_fn`, sampling up to
// `max_coords` coordinates; returns the max relative error
// |a-n| / max(|a|,|n|,1e-8).
double gradient_check(const std::function<double()>& loss_fn,
                      const ParamView& params, const Vec& analytic,
                      double step, size_t max_coords, uint64_t seed);

}  // namespace casekit::nn
