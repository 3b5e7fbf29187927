#include "casekit/nn.hpp"

#include <algorithm>
#include <cmath>

#include "casekit/errors.hpp"
#include "casekit/rng.hpp"

namespace casekit::nn {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// y = A x (+ y), A row-major (rows x cols)
void matvec_add(const Tensor2& a, const Vec& x, Vec& y) {
  for (size_t r = 0; r < a.rows; ++r) {
    const double* row = &a.values[r * a.cols];
    double acc = y[r];
    for (size_t c = 0; c < a.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

// y += A^T x
void matvec_transpose_add(const Tensor2& a, const Vec& x, Vec& y) {
  for (size_t r = 0; r < a.rows; ++r) {
    const double* row = &a.values[r * a.cols];
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (size_t c = 0; c < a.cols; ++c) y[c] += row[c] * xr;
  }
}

// A += x y^T  (outer product accumulate)
void outer_add(Tensor2& a, const Vec& x, const Vec& y) {
  for (size_t r = 0; r < a.rows; ++r) {
    double* row = &a.values[r * a.cols];
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (size_t c = 0; c < a.cols; ++c) row[c] += xr * y[c];
  }
}

void check_cell_dims(const Vec& x, const Vec& h_prev, const Vec& c_prev,
                     const LstmCellParams& p) {
  const size_t h = p.hidden_size();
  if (p.input_weights.rows != 4 * h || p.bias.size() != 4 * h ||
      p.recurrent_weights.rows != 4 * h || x.size() != p.input_size() ||
      h_prev.size() != h || c_prev.size() != h) {
    throw ContractViolation("lstm_cell_step: inconsistent dimensions");
  }
}

struct GateCache {
  Vec i, f, g, o, c, tanh_c, h;
};

// Runs one LSTM direction over `inputs` visiting timesteps in `order`;
// caches gate activations per visited step for BPTT.
std::vector<GateCache> run_direction(const std::vector<Vec>& inputs,
                                     const std::vector<size_t>& order,
                                     const LstmCellParams& p) {
  const size_t hsz = p.hidden_size();
  std::vector<GateCache> cache(order.size());
  Vec h_prev(hsz, 0.0), c_prev(hsz, 0.0);
  Vec pre(4 * hsz);
  for (size_t k = 0; k < order.size(); ++k) {
    const Vec& x = inputs[order[k]];
    pre = p.bias;
    matvec_add(p.input_weights, x, pre);
    matvec_add(p.recurrent_weights, h_prev, pre);
    GateCache& gc = cache[k];
    gc.i.resize(hsz);
    gc.f.resize(hsz);
    gc.g.resize(hsz);
    gc.o.resize(hsz);
    gc.c.resize(hsz);
    gc.tanh_c.resize(hsz);
    gc.h.resize(hsz);
    for (size_t j = 0; j < hsz; ++j) {
      gc.i[j] = sigmoid(pre[j]);
      gc.f[j] = sigmoid(pre[hsz + j]);
      gc.g[j] = std::tanh(pre[2 * hsz + j]);
      gc.o[j] = sigmoid(pre[3 * hsz + j]);
      gc.c[j] = gc.f[j] * c_prev[j] + gc.i[j] * gc.g[j];
      gc.tanh_c[j] = std::tanh(gc.c[j]);
      gc.h[j] = gc.o[j] * gc.tanh_c[j];
    }
    h_prev = gc.h;
    c_prev = gc.c;
  }
  return cache;
}

// BPTT through one direction. dh_upstream is indexed by timestep; dx
// receives input gradients; grads accumulates parameter gradients.
void backward_direction(const std::vector<Vec>& inputs,
                        const std::vector<size_t>& order,
                        const LstmCellParams& p,
                        const std::vector<GateCache>& cache,
                        const std::vector<Vec>& dh_upstream,
                        std::vector<Vec>& dx, LstmCellParams& grads) {
  const size_t hsz = p.hidden_size();
  Vec dh_rec(hsz, 0.0), dc_carry(hsz, 0.0);
  Vec dgates(4 * hsz);
  const Vec zeros(hsz, 0.0);
  for (size_t k = order.size(); k-- > 0;) {
    const size_t t = order[k];
    const GateCache& gc = cache[k];
    const Vec& h_prev = k > 0 ? cache[k - 1].h : zeros;
    const Vec& c_prev = k > 0 ? cache[k - 1].c : zeros;
    for (size_t j = 0; j < hsz; ++j) {
      const double dh = dh_upstream[t][j] + dh_rec[j];
      const double dc = dc_carry[j] + dh * gc.o[j] * (1.0 - gc.tanh_c[j] * gc.tanh_c[j]);
      const double di = dc * gc.g[j] * gc.i[j] * (1.0 - gc.i[j]);
      const double df = dc * c_prev[j] * gc.f[j] * (1.0 - gc.f[j]);
      const double dg = dc * gc.i[j] * (1.0 - gc.g[j] * gc.g[j]);
      const double do_ = dh * gc.tanh_c[j] * gc.o[j] * (1.0 - gc.o[j]);
      dgates[j] = di;
      dgates[hsz + j] = df;
      dgates[2 * hsz + j] = dg;
      dgates[3 * hsz + j] = do_;
      dc_carry[j] = dc * gc.f[j];
    }
    outer_add(grads.input_weights, dgates, inputs[t]);
    outer_add(grads.recurrent_weights, dgates, h_prev);
    for (size_t r = 0; r < 4 * hsz; ++r) grads.bias[r] += dgates[r];
    matvec_transpose_add(p.input_weights, dgates, dx[t]);
    std::fill(dh_rec.begin(), dh_rec.end(), 0.0);
    matvec_transpose_add(p.recurrent_weights, dgates, dh_rec);
  }
}

std::vector<size_t> forward_order(size_t n) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  return order;
}

std::vector<size_t> backward_order(size_t n) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = n - 1 - i;
  return order;
}

}  // namespace

void lstm_cell_step(const Vec& x, const Vec& h_prev, const Vec& c_prev,
                    const LstmCellParams& params, Vec& h_out, Vec& c_out) {
  check_cell_dims(x, h_prev, c_prev, params);
  const size_t hsz = params.hidden_size();
  h_out.assign(hsz, 0.0);
  c_out.assign(hsz, 0.0);
  Vec pre = params.bias;
  matvec_add(params.input_weights, x, pre);
  matvec_add(params.recurrent_weights, h_prev, pre);
  for (size_t j = 0; j < hsz; ++j) {
    const double i = sigmoid(pre[j]);
    const double f = sigmoid(pre[hsz + j]);
    const double g = std::tanh(pre[2 * hsz + j]);
    const double o = sigmoid(pre[3 * hsz + j]);
    c_out[j] = f * c_prev[j] + i * g;
    h_out[j] = o * std::tanh(c_out[j]);
  }
}

std::vector<Vec> bilstm_encode(const std::vector<Vec>& inputs,
                               const std::vector<BiLayerParams>& layers) {
  if (layers.empty()) throw ContractViolation("bilstm_encode: no layers");
  if (inputs.empty()) return {};
  std::vector<Vec> current = inputs;
  for (const auto& layer : layers) {
    const size_t n = current.size();
    const size_t hsz = layer.forward.hidden_size();
    const auto fwd = run_direction(current, forward_order(n), layer.forward);
    const auto bwd = run_direction(current, backward_order(n), layer.backward);
    std::vector<Vec> next(n, Vec(2 * hsz));
    for (size_t t = 0; t < n; ++t) {
      std::copy(fwd[t].h.begin(), fwd[t].h.end(), next[t].begin());
      // bwd visits timesteps reversed: its step k covers timestep n-1-k
      std::copy(bwd[n - 1 - t].h.begin(), bwd[n - 1 - t].h.end(),
                next[t].begin() + hsz);
    }
    current = std::move(next);
  }
  return current;
}

Vec linear_logits(const std::vector<Vec>& inputs, const Tensor2& weight,
                  double bias) {
  if (weight.rows != 1) throw ContractViolation("linear_logits: weight must be 1 x D");
  Vec out;
  out.reserve(inputs.size());
  for (const auto& v : inputs) {
    if (v.size() != weight.cols) {
      throw ContractViolation("linear_logits: input dimension mismatch");
    }
    double z = bias;
    for (size_t j = 0; j < v.size(); ++j) z += weight.values[j] * v[j];
    out.push_back(z);
  }
  return out;
}

double bce_with_logits(const Vec& logits, const std::vector<int>& labels,
                       const std::vector<int>& mask) {
  if (logits.size() != labels.size() || logits.size() != mask.size()) {
    throw ContractViolation("bce_with_logits: length mismatch");
  }
  double total = 0.0;
  size_t count = 0;
  for (size_t t = 0; t < logits.size(); ++t) {
    if (!mask[t]) continue;
    const double z = logits[t];
    const double y = labels[t];
    total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    ++count;
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

BilstmClassifier init_classifier(size_t vocab, size_t embedding_dim,
                                 size_t hidden_dim, size_t num_layers,
                                 uint64_t seed) {
  if (vocab == 0 || embedding_dim == 0 || hidden_dim == 0 || num_layers == 0) {
    throw ContractViolation("init_classifier: dimensions must be positive");
  }
  Rng rng(seed, 0x1157);
  BilstmClassifier m;
  m.embedding = Tensor2(vocab, embedding_dim);
  for (auto& v : m.embedding.values) v = rng.uniform_real(-0.1, 0.1);

  const double bound = std::sqrt(1.0 / static_cast<double>(hidden_dim));
  auto init_cell = [&](size_t input_size) {
    LstmCellParams p;
    p.input_weights = Tensor2(4 * hidden_dim, input_size);
    p.recurrent_weights = Tensor2(4 * hidden_dim, hidden_dim);
    p.bias.assign(4 * hidden_dim, 0.0);
    for (auto& v : p.input_weights.values) v = rng.uniform_real(-bound, bound);
    for (auto& v : p.recurrent_weights.values) v = rng.uniform_real(-bound, bound);
    for (size_t j = 0; j < hidden_dim; ++j) p.bias[hidden_dim + j] = 1.0;  // forget gate
    return p;
  };
  for (size_t l = 0; l < num_layers; ++l) {
    const size_t in = l == 0 ? embedding_dim : 2 * hidden_dim;
    BiLayerParams layer;
    layer.forward = init_cell(in);
    layer.backward = init_cell(in);
    m.layers.push_back(std::move(layer));
  }
  m.head_weight = Tensor2(1, 2 * hidden_dim);
  const double hb = std::sqrt(1.0 / static_cast<double>(2 * hidden_dim));
  for (auto& v : m.head_weight.values) v = rng.uniform_real(-hb, hb);
  m.head_bias = 0.0;
  return m;
}

BilstmClassifier zeros_like(const BilstmClassifier& m) {
  BilstmClassifier z = m;
  z.embedding.values.assign(z.embedding.values.size(), 0.0);
  for (auto& layer : z.layers) {
    for (auto* cell : {&layer.forward, &layer.backward}) {
      cell->input_weights.values.assign(cell->input_weights.values.size(), 0.0);
      cell->recurrent_weights.values.assign(cell->recurrent_weights.values.size(), 0.0);
      cell->bias.assign(cell->bias.size(), 0.0);
    }
  }
  z.head_weight.values.assign(z.head_weight.values.size(), 0.0);
  z.head_bias = 0.0;
  return z;
}

void scale_params(BilstmClassifier& m, double factor) {
  for (auto& v : m.embedding.values) v *= factor;
  for (auto& layer : m.layers) {
    for (auto* cell : {&layer.forward, &layer.backward}) {
      for (auto& v : cell->input_weights.values) v *= factor;
      for (auto& v : cell->recurrent_weights.values) v *= factor;
      for (auto& v : cell->bias) v *= factor;
    }
  }
  for (auto& v : m.head_weight.values) v *= factor;
  m.head_bias *= factor;
}

namespace {

std::vector<Vec> embed(const BilstmClassifier& model,
                       const std::vector<size_t>& ids) {
  std::vector<Vec> x(ids.size(), Vec(model.embedding_dim()));
  for (size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] >= model.vocab_size()) {
      throw ContractViolation("char id out of vocabulary range");
    }
    for (size_t j = 0; j < model.embedding_dim(); ++j) {
      x[t][j] = model.embedding.at(ids[t], j);
    }
  }
  return x;
}

}  // namespace

Vec forward_logits(const BilstmClassifier& model, const std::vector<size_t>& ids) {
  if (ids.empty()) return {};
  const auto encoded = bilstm_encode(embed(model, ids), model.layers);
  return linear_logits(encoded, model.head_weight, model.head_bias);
}

std::pair<double, size_t> sequence_loss_and_grads(
    const BilstmClassifier& model, const std::vector<size_t>& ids,
    const std::vector<int>& labels, BilstmClassifier& grads) {
  if (ids.size() != labels.size()) {
    throw ContractViolation("sequence_loss_and_grads: ids/labels length mismatch");
  }
  const size_t n = ids.size();
  if (n == 0) return {0.0, 0};

  // forward with per-layer caches
  std::vector<Vec> layer_input = embed(model, ids);
  std::vector<std::vector<Vec>> inputs_per_layer;   // input fed to each layer
  std::vector<std::vector<GateCache>> fwd_caches, bwd_caches;
  for (const auto& layer : model.layers) {
    inputs_per_layer.push_back(layer_input);
    const size_t hsz = layer.forward.hidden_size();
    auto fwd = run_direction(layer_input, forward_order(n), layer.forward);
    auto bwd = run_direction(layer_input, backward_order(n), layer.backward);
    std::vector<Vec> next(n, Vec(2 * hsz));
    for (size_t t = 0; t < n; ++t) {
      std::copy(fwd[t].h.begin(), fwd[t].h.end(), next[t].begin());
      std::copy(bwd[n - 1 - t].h.begin(), bwd[n - 1 - t].h.end(),
                next[t].begin() + hsz);
    }
    fwd_caches.push_back(std::move(fwd));
    bwd_caches.push_back(std::move(bwd));
    layer_input = std::move(next);
  }
  const std::vector<Vec>& encoded = layer_input;

  double loss = 0.0;
  std::vector<Vec> d_encoded(n, Vec(encoded[0].size(), 0.0));
  for (size_t t = 0; t < n; ++t) {
    double z = model.head_bias;
    for (size_t j = 0; j < encoded[t].size(); ++j) {
      z += model.head_weight.values[j] * encoded[t][j];
    }
    const double y = labels[t];
    loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    const double dz = sigmoid(z) - y;
    grads.head_bias += dz;
    for (size_t j = 0; j < encoded[t].size(); ++j) {
      grads.head_weight.values[j] += dz * encoded[t][j];
      d_encoded[t][j] += dz * model.head_weight.values[j];
    }
  }

  // backprop through layers, top down
  std::vector<Vec> d_out = std::move(d_encoded);
  for (size_t l = model.layers.size(); l-- > 0;) {
    const auto& layer = model.layers[l];
    const size_t hsz = layer.forward.hidden_size();
    std::vector<Vec> dh_f(n, Vec(hsz)), dh_b(n, Vec(hsz));
    for (size_t t = 0; t < n; ++t) {
      std::copy(d_out[t].begin(), d_out[t].begin() + hsz, dh_f[t].begin());
      std::copy(d_out[t].begin() + hsz, d_out[t].end(), dh_b[t].begin());
    }
    std::vector<Vec> dx(n, Vec(inputs_per_layer[l][0].size(), 0.0));
    backward_direction(inputs_per_layer[l], forward_order(n), layer.forward,
                       fwd_caches[l], dh_f, dx, grads.layers[l].forward);
    backward_direction(inputs_per_layer[l], backward_order(n), layer.backward,
                       bwd_caches[l], dh_b, dx, grads.layers[l].backward);
    d_out = std::move(dx);
  }

  // d_out now holds gradients w.r.t. embedding vectors
  for (size_t t = 0; t < n; ++t) {
    for (size_t j = 0; j < model.embedding_dim(); ++j) {
      grads.embedding.at(ids[t], j) += d_out[t][j];
    }
  }
  return {loss, n};
}

const std::string& ParamView::segment_name(size_t flat_index) const {
  static const std::string unknown = "?";
  const std::string* best = &unknown;
  for (const auto& [start, name] : segments) {
    if (start <= flat_index) best = &name;
  }
  return *best;
}

ParamView flatten(BilstmClassifier& m) {
  ParamView view;
  auto add = [&](Vec& v, const std::string& name) {
    view.segments.emplace_back(view.ptrs.size(), name);
    for (auto& x : v) view.ptrs.push_back(&x);
  };
  add(m.embedding.values, "embedding");
  for (size_t l = 0; l < m.layers.size(); ++l) {
    const std::string base = "layer" + std::to_string(l);
    add(m.layers[l].forward.input_weights.values, base + ".fwd.input_weights");
    add(m.layers[l].forward.recurrent_weights.values, base + ".fwd.recurrent_weights");
    add(m.layers[l].forward.bias, base + ".fwd.bias");
    add(m.layers[l].backward.input_weights.values, base + ".bwd.input_weights");
    add(m.layers[l].backward.recurrent_weights.values, base + ".bwd.recurrent_weights");
    add(m.layers[l].backward.bias, base + ".bwd.bias");
  }
  add(m.head_weight.values, "head.weight");
  view.segments.emplace_back(view.ptrs.size(), "head.bias");
  view.ptrs.push_back(&m.head_bias);
  return view;
}

Vec to_flat(const BilstmClassifier& m) {
  auto copy = m;
  auto view = flatten(copy);
  Vec out;
  out.reserve(view.size());
  for (double* p : view.ptrs) out.push_back(*p);
  return out;
}

void adam_step(ParamView& params, Vec grads, AdamState& state) {
  if (grads.size() != params.size()) {
    throw ContractViolation("adam_step: gradient size mismatch");
  }
  for (size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw Error("non-finite gradient in parameter " + params.segment_name(i));
    }
  }
  const AdamConfig& cfg = state.config;
  if (cfg.clip_norm > 0.0) {
    double sq = 0.0;
    for (double g : grads) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > cfg.clip_norm) {
      const double s = cfg.clip_norm / norm;
      for (double& g : grads) g *= s;
    }
  }
  if (state.first_moment.empty()) {
    state.first_moment.assign(params.size(), 0.0);
    state.second_moment.assign(params.size(), 0.0);
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (size_t i = 0; i < grads.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grads[i];
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    *params.ptrs[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

double gradient_check(const std::function<double()>& loss_fn,
                      const ParamView& params, const Vec& analytic,
                      double step, size_t max_coords, uint64_t seed) {
  if (step <= 0.0) throw ContractViolation("gradient_check: step must be > 0");
  if (analytic.size() != params.size()) {
    throw ContractViolation("gradient_check: gradient size mismatch");
  }
  std::vector<size_t> coords(params.size());
  for (size_t i = 0; i < coords.size(); ++i) coords[i] = i;
  if (coords.size() > max_coords) {
    Rng rng(seed, 0x6C);
    rng.shuffle(coords);
    coords.resize(max_coords);
  }
  double max_err = 0.0;
  for (size_t i : coords) {
    double* p = params.ptrs[i];
    const double saved = *p;
    *p = saved + step;
    const double up = loss_fn();
    *p = saved - step;
    const double down = loss_fn();
    *p = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    max_err = std::max(max_err, std::abs(a - numeric) / denom);
  }
  return max_err;
}

}  // namespace casekit::nn
