#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "casekit/errors.hpp"
#include "casekit/nn.hpp"
#include "casekit/rng.hpp"

using namespace casekit;
using nn::Tensor2;
using nn::Vec;

namespace {

nn::LstmCellParams zero_cell(size_t hidden, size_t input) {
  nn::LstmCellParams p;
  p.input_weights = Tensor2(4 * hidden, input);
  p.recurrent_weights = Tensor2(4 * hidden, hidden);
  p.bias.assign(4 * hidden, 0.0);
  return p;
}

std::vector<Vec> random_inputs(Rng& rng, size_t n, size_t dim) {
  std::vector<Vec> x(n, Vec(dim));
  for (auto& v : x) {
    for (auto& e : v) e = rng.uniform_real(-1.0, 1.0);
  }
  return x;
}

}  // namespace

TEST_CASE("lstm cell with all zeros") {
  const auto p = zero_cell(2, 3);
  Vec h, c;
  nn::lstm_cell_step(Vec(3, 0.0), Vec(2, 0.0), Vec(2, 0.0), p, h, c);
  CHECK(h == Vec{0.0, 0.0});
  CHECK(c == Vec{0.0, 0.0});
}

TEST_CASE("lstm cell hand value with carried cell state") {
  // zero weights, zero input, c_prev = 1: gates all sigmoid(0)=0.5, g=0
  const auto p = zero_cell(1, 1);
  Vec h, c;
  nn::lstm_cell_step(Vec{0.0}, Vec{0.0}, Vec{1.0}, p, h, c);
  CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h[0] == doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-9));
  CHECK(h[0] == doctest::Approx(0.231059).epsilon(1e-4));
}

TEST_CASE("lstm cell outputs are bounded") {
  Rng rng(31);
  for (int iter = 0; iter < 100; ++iter) {
    auto p = zero_cell(3, 2);
    for (auto& v : p.input_weights.values) v = rng.uniform_real(-3.0, 3.0);
    for (auto& v : p.recurrent_weights.values) v = rng.uniform_real(-3.0, 3.0);
    for (auto& v : p.bias) v = rng.uniform_real(-3.0, 3.0);
    Vec h, c;
    nn::lstm_cell_step(random_inputs(rng, 1, 2)[0], random_inputs(rng, 1, 3)[0],
                       random_inputs(rng, 1, 3)[0], p, h, c);
    for (double v : h) CHECK(std::abs(v) < 1.0);
  }
}

TEST_CASE("lstm cell dimension mismatch") {
  const auto p = zero_cell(2, 3);
  Vec h, c;
  CHECK_THROWS_AS(nn::lstm_cell_step(Vec(5, 0.0), Vec(2, 0.0), Vec(2, 0.0), p, h, c),
                  ContractViolation);
}

TEST_CASE("bilstm encode degenerate cases") {
  std::vector<nn::BiLayerParams> layers(1);
  layers[0].forward = zero_cell(2, 3);
  layers[0].backward = zero_cell(2, 3);
  CHECK(nn::bilstm_encode({}, layers).empty());

  Rng rng(7);
  const auto one = nn::bilstm_encode(random_inputs(rng, 1, 3), layers);
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 4);
  // zero parameters force zero outputs
  for (double v : one[0]) CHECK(v == 0.0);
}

TEST_CASE("bilstm reversal symmetry") {
  Rng rng(41);
  for (int iter = 0; iter < 50; ++iter) {
    const size_t e = 2 + rng.uniform_int(3);
    const size_t h = 2 + rng.uniform_int(3);
    const size_t n = 1 + rng.uniform_int(5);
    auto random_cell = [&](size_t input) {
      auto p = zero_cell(h, input);
      for (auto& v : p.input_weights.values) v = rng.uniform_real(-1.0, 1.0);
      for (auto& v : p.recurrent_weights.values) v = rng.uniform_real(-1.0, 1.0);
      for (auto& v : p.bias) v = rng.uniform_real(-1.0, 1.0);
      return p;
    };
    std::vector<nn::BiLayerParams> layers(1);
    layers[0].forward = random_cell(e);
    layers[0].backward = random_cell(e);
    const auto inputs = random_inputs(rng, n, e);

    std::vector<Vec> reversed_inputs(inputs.rbegin(), inputs.rend());
    std::vector<nn::BiLayerParams> swapped(1);
    swapped[0].forward = layers[0].backward;
    swapped[0].backward = layers[0].forward;

    const auto out = nn::bilstm_encode(inputs, layers);
    const auto rev = nn::bilstm_encode(reversed_inputs, swapped);
    for (size_t t = 0; t < n; ++t) {
      for (size_t j = 0; j < h; ++j) {
        CHECK(out[t][j] == doctest::Approx(rev[n - 1 - t][h + j]).epsilon(1e-12));
        CHECK(out[t][h + j] == doctest::Approx(rev[n - 1 - t][j]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("linear logits") {
  Tensor2 w(1, 3);
  CHECK(nn::linear_logits({Vec{1.0, 2.0, 3.0}}, w, 0.0)[0] == 0.0);
  w.values = {1.0, 0.0, 0.0};
  CHECK(nn::linear_logits({Vec{2.0, 5.0, 7.0}}, w, 1.0)[0] == doctest::Approx(3.0));
  // linearity with zero bias
  const auto a = nn::linear_logits({Vec{2.0, -1.0, 0.5}}, w, 0.0)[0];
  const auto b = nn::linear_logits({Vec{4.0, -2.0, 1.0}}, w, 0.0)[0];
  CHECK(b == doctest::Approx(2.0 * a));
}

TEST_CASE("bce with logits") {
  CHECK(nn::bce_with_logits({0.0}, {1}, {1}) == doctest::Approx(std::log(2.0)));
  CHECK(nn::bce_with_logits({100.0}, {1}, {1}) < 1e-10);
  CHECK(nn::bce_with_logits({0.0, 0.0}, {1, 0}, {1, 0}) ==
        doctest::Approx(std::log(2.0)));
  CHECK(nn::bce_with_logits({5.0}, {1}, {0}) == 0.0);
  CHECK_THROWS_AS(nn::bce_with_logits({0.0}, {1, 0}, {1, 1}), ContractViolation);
}

TEST_CASE("bce matches the naive formulation for moderate logits") {
  Rng rng(91);
  for (int iter = 0; iter < 300; ++iter) {
    const double z = rng.uniform_real(-30.0, 30.0);
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    // naive loss written via -log(sigmoid(z)) = log(1+exp(-z)) so the
    // reference itself stays accurate over the whole range
    const double naive =
        y * std::log(1.0 + std::exp(-z)) + (1 - y) * std::log(1.0 + std::exp(z));
    CHECK(std::abs(nn::bce_with_logits({z}, {y}, {1}) - naive) < 1e-12);
  }
}

TEST_CASE("gradient of an untouched parameter is zero") {
  auto model = nn::init_classifier(6, 3, 4, 2, 5);
  auto grads = nn::zeros_like(model);
  nn::sequence_loss_and_grads(model, {2, 3, 4}, {0, 1, 0}, grads);
  // embedding rows for unused ids stay exactly zero
  for (size_t j = 0; j < model.embedding_dim(); ++j) {
    CHECK(grads.embedding.at(0, j) == 0.0);
    CHECK(grads.embedding.at(5, j) == 0.0);
  }
}

TEST_CASE("full model gradients match central differences") {
  Rng rng(777);
  for (int iter = 0; iter < 3; ++iter) {
    const size_t vocab = 5, e = 3 + iter % 3, h = 4 + iter % 3;
    auto model = nn::init_classifier(vocab, e, h, 2, 100 + iter);
    std::vector<size_t> ids;
    std::vector<int> labels;
    const size_t n = 3 + rng.uniform_int(5);
    for (size_t t = 0; t < n; ++t) {
      ids.push_back(rng.uniform_int(vocab));
      labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
    }

    auto grads = nn::zeros_like(model);
    auto [loss, count] = nn::sequence_loss_and_grads(model, ids, labels, grads);
    CHECK(count == n);
    nn::scale_params(grads, 1.0 / static_cast<double>(n));

    auto loss_fn = [&] {
      const auto logits = nn::forward_logits(model, ids);
      return nn::bce_with_logits(logits, labels, std::vector<int>(n, 1));
    };
    CHECK(loss_fn() == doctest::Approx(loss / n).epsilon(1e-12));

    auto view = nn::flatten(model);
    // step 1e-3: small enough for truncation, large enough that rounding
    // noise stays under the 1e-8 floor on near-zero gradients
    const double err = nn::gradient_check(loss_fn, view, nn::to_flat(grads), 1e-3,
                                          250, 9 + iter);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("gradient_check detects a corrupted gradient") {
  auto model = nn::init_classifier(4, 2, 3, 1, 11);
  std::vector<size_t> ids = {1, 2, 3};
  std::vector<int> labels = {1, 0, 1};
  auto grads = nn::zeros_like(model);
  nn::sequence_loss_and_grads(model, ids, labels, grads);
  nn::scale_params(grads, 1.0 / 3.0);
  auto bad = nn::to_flat(grads);
  for (auto& g : bad) g *= 1.01;
  auto loss_fn = [&] {
    return nn::bce_with_logits(nn::forward_logits(model, ids), labels, {1, 1, 1});
  };
  auto view = nn::flatten(model);
  CHECK(nn::gradient_check(loss_fn, view, bad, 1e-5, 2000, 1) >= 0.005);
}

TEST_CASE("gradient_check scalar sanity") {
  double theta = 3.0;
  std::vector<double*> ptrs = {&theta};
  nn::ParamView view;
  view.ptrs = ptrs;
  view.segments = {{0, "theta"}};
  auto quadratic = [&] { return theta * theta; };
  CHECK(nn::gradient_check(quadratic, view, {6.0}, 1e-5, 10, 1) < 1e-9);

  theta = 1.0;
  auto sine = [&] { return std::sin(theta); };
  CHECK(nn::gradient_check(sine, view, {std::cos(1.0)}, 1e-5, 10, 1) < 1e-9);
}

TEST_CASE("adam hand-checked first step") {
  double theta = 1.0;
  nn::ParamView view;
  view.ptrs = {&theta};
  view.segments = {{0, "theta"}};
  nn::AdamState state;
  state.config.lr = 0.1;
  nn::adam_step(view, {1.0}, state);
  CHECK(state.step_count == 1);
  CHECK(theta == doctest::Approx(0.9).epsilon(1e-7));
}

TEST_CASE("adam zero gradient leaves parameters fixed") {
  double a = 2.5, b = -1.0;
  nn::ParamView view;
  view.ptrs = {&a, &b};
  view.segments = {{0, "p"}};
  nn::AdamState state;
  nn::adam_step(view, {0.0, 0.0}, state);
  CHECK(a == 2.5);
  CHECK(b == -1.0);
}

TEST_CASE("adam treats identical coordinates identically") {
  double a = 1.0, b = 1.0;
  nn::ParamView view;
  view.ptrs = {&a, &b};
  view.segments = {{0, "p"}};
  nn::AdamState state;
  for (int i = 0; i < 5; ++i) nn::adam_step(view, {0.3, 0.3}, state);
  CHECK(a == b);
}

TEST_CASE("adam rejects non-finite gradients by name") {
  double a = 1.0;
  nn::ParamView view;
  view.ptrs = {&a};
  view.segments = {{0, "head.bias"}};
  nn::AdamState state;
  try {
    nn::adam_step(view, {std::nan("")}, state);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("head.bias") != std::string::npos);
  }
}

TEST_CASE("initialization is deterministic and uses forget-gate bias 1") {
  const auto a = nn::init_classifier(10, 4, 5, 2, 42);
  const auto b = nn::init_classifier(10, 4, 5, 2, 42);
  CHECK(a == b);
  const auto c = nn::init_classifier(10, 4, 5, 2, 43);
  CHECK(a != c);
  for (size_t j = 0; j < 5; ++j) {
    CHECK(a.layers[0].forward.bias[5 + j] == 1.0);
    CHECK(a.layers[0].forward.bias[j] == 0.0);
  }
}
