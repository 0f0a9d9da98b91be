#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "gtn/equivalence.hpp"
#include "gtn/graphs.hpp"
#include "gtn/layers.hpp"
#include "gtn/rng.hpp"
#include "gtn/tensor.hpp"
#include "gtn/tt.hpp"

using namespace gtn;

namespace {

DenseTensor random_tensor(Rng& rng, const Shape& shape, double lo = -1.0, double hi = 1.0) {
  DenseTensor t(shape);
  for (index_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("forward pass with identity operators is the identity map") {
  Rng rng(71);
  const DenseTensor x = random_tensor(rng, Shape{3, 4, 2});
  GTNLayerSpec layer;
  layer.domain_gsos = {gso_identity(3), gso_identity(4)};
  layer.feature_weights = {DenseTensor::identity(2)};
  const DenseTensor y = gtn_forward(x, DataTensorMeta{2, 1}, layer);
  CHECK(max_abs_diff(y, x) == 0.0);
}

TEST_CASE("forward pass equals the Kronecker-vectorized transform") {
  Rng rng(72);
  const DenseTensor x = random_tensor(rng, Shape{3, 4, 2});
  const DenseTensor s1 = random_tensor(rng, Shape{3, 3});
  const DenseTensor s2 = random_tensor(rng, Shape{4, 4});
  const DenseTensor w1 = random_tensor(rng, Shape{5, 2});
  GTNLayerSpec layer;
  layer.domain_gsos = {gso_custom(s1), gso_custom(s2)};
  layer.feature_weights = {w1};
  const DenseTensor y = gtn_forward(x, DataTensorMeta{2, 1}, layer);
  CHECK(y.shape() == Shape{3, 4, 5});
  const DenseTensor big = kronecker(kronecker(s1, s2), w1);
  const DenseTensor vec_y = vectorize(y);
  const DenseTensor ref = matmul(big, matricize(vectorize(x), 1));
  CHECK(max_abs_diff(vec_y, vectorize(ref)) < 1e-10);
}

TEST_CASE("order-(3+2) forward pass resizes only the feature modes") {
  Rng rng(73);
  const DenseTensor x = random_tensor(rng, Shape{2, 3, 4, 3, 2});
  GTNLayerSpec layer;
  layer.domain_gsos = {gso_identity(2), gso_time_decay(3, 0.5),
                       gso_circulant(random_tensor(rng, Shape{2}), 4)};
  layer.feature_weights = {random_tensor(rng, Shape{4, 3}), random_tensor(rng, Shape{5, 2})};
  const DenseTensor y = gtn_forward(x, DataTensorMeta{3, 2}, layer);
  CHECK(y.shape() == Shape{2, 3, 4, 4, 5});
}

TEST_CASE("output shape is independent of the activation kind") {
  Rng rng(74);
  const DenseTensor x = random_tensor(rng, Shape{3, 2});
  GTNLayerSpec layer;
  layer.domain_gsos = {gso_identity(3)};
  layer.feature_weights = {random_tensor(rng, Shape{4, 2})};
  Shape reference;
  bool first = true;
  for (const ActivationKind kind :
       {ActivationKind::identity, ActivationKind::relu, ActivationKind::tanh,
        ActivationKind::sigmoid, ActivationKind::softmax_last_mode}) {
    layer.activation = kind;
    const DenseTensor y = gtn_forward(x, DataTensorMeta{1, 1}, layer);
    if (first) {
      reference = y.shape();
      first = false;
    }
    CHECK(y.shape() == reference);
  }
}

TEST_CASE("bias is added before the activation") {
  const DenseTensor x(Shape{2}, {0.0, 0.0});
  GTNLayerSpec layer;
  layer.feature_weights = {DenseTensor::identity(2)};
  layer.bias = DenseTensor(Shape{2}, {-1.0, 1.0});
  layer.activation = ActivationKind::relu;
  const DenseTensor y = gtn_forward(x, DataTensorMeta{0, 1}, layer);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 1.0);
}

TEST_CASE("a single non-identity operator acts on the unfolded signal matrix") {
  Rng rng(75);
  const DenseTensor x = random_tensor(rng, Shape{3, 4, 2});
  const DenseTensor s = random_tensor(rng, Shape{4, 4});
  GTNLayerSpec layer;
  layer.domain_gsos = {gso_identity(3), gso_custom(s)};
  layer.feature_weights = {DenseTensor::identity(2)};
  const DenseTensor via_forward = gtn_forward(x, DataTensorMeta{2, 1}, layer);
  const DenseTensor via_unfolding =
      dematricize(matmul(s, matricize(x, 2)), 2, x.shape());
  CHECK(via_forward.values() == via_unfolding.values());
}

TEST_CASE("forward pass validates shapes") {
  Rng rng(76);
  const DenseTensor x = random_tensor(rng, Shape{3, 2});
  GTNLayerSpec layer;
  layer.domain_gsos = {gso_identity(4)};  // wrong size
  layer.feature_weights = {DenseTensor::identity(2)};
  CHECK_THROWS_AS(gtn_forward(x, DataTensorMeta{1, 1}, layer), std::invalid_argument);
  GTNLayerSpec missing;
  CHECK_THROWS_AS(gtn_forward(x, DataTensorMeta{1, 1}, missing), std::invalid_argument);
}

TEST_CASE("dense forward basics") {
  Rng rng(77);
  const DenseTensor x = random_tensor(rng, Shape{4});
  CHECK(max_abs_diff(dnn_forward(x, DenseTensor::identity(4)), x) == 0.0);
  const DenseTensor zero(Shape{4});
  const DenseTensor w = random_tensor(rng, Shape{3, 4});
  CHECK(max_abs(dnn_forward(zero, w)) == 0.0);
}

TEST_CASE("dense forward equals its graph tensor reduction bit-exactly") {
  Rng rng(78);
  const DenseTensor w = random_tensor(rng, Shape{3, 4});
  const DenseTensor x = random_tensor(rng, Shape{4});
  const DenseTensor direct = dnn_forward(x, w);
  GTNLayerSpec layer;
  layer.feature_weights = {w};
  const DenseTensor via_gtn = gtn_forward(x, DataTensorMeta{0, 1}, layer);
  CHECK(direct.values() == via_gtn.values());
}

TEST_CASE("graph convolution on an edgeless graph is a per-row dense layer") {
  Rng rng(79);
  const DenseTensor x = random_tensor(rng, Shape{3, 2});
  const DenseTensor w = random_tensor(rng, Shape{2, 4});
  const DenseTensor y = gcn_forward(x, DenseTensor(Shape{3, 3}), w);
  CHECK(max_abs_diff(y, matmul(x, w)) == 0.0);
}

TEST_CASE("graph convolution with identity weights is the graph shift") {
  Rng rng(80);
  const DenseTensor a = DenseTensor::matrix({{0, 1}, {1, 0}});
  const DenseTensor x = random_tensor(rng, Shape{2, 2});
  const DenseTensor y = gcn_forward(x, a, DenseTensor::identity(2));
  CHECK(max_abs_diff(y, graph_shift(gso_gcn(a), x)) == 0.0);
}

TEST_CASE("convolution forward basics") {
  Rng rng(81);
  const DenseTensor x = random_tensor(rng, Shape{6});
  CHECK(max_abs_diff(cnn_forward(x, DenseTensor(Shape{1}, {1.0})), x) == 0.0);

  // one-hot input places the kernel by the circular index rule
  const DenseTensor e1(Shape{4}, {1.0, 0.0, 0.0, 0.0});
  const DenseTensor kernel(Shape{2}, {2.0, 3.0});
  const DenseTensor y = cnn_forward(e1, kernel);
  CHECK(y[0] == 2.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 0.0);
  CHECK(y[3] == 3.0);
  CHECK_THROWS_AS(cnn_forward(e1, random_tensor(rng, Shape{4})), std::invalid_argument);
}

TEST_CASE("convolution matches a direct double-loop oracle") {
  Rng rng(82);
  const DenseTensor x = random_tensor(rng, Shape{8});
  const DenseTensor kernel = random_tensor(rng, Shape{3});
  const DenseTensor y = cnn_forward(x, kernel);
  for (index_t i = 0; i < 8; ++i) {
    double expected = 0.0;
    for (index_t p = 0; p < 3; ++p) expected += kernel[p] * x[(i + p) % 8];
    CHECK(y[i] == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("attention with zero query weights averages the value rows") {
  Rng rng(83);
  const DenseTensor x = random_tensor(rng, Shape{4, 3});
  const DenseTensor wv = random_tensor(rng, Shape{3, 2});
  const DenseTensor zero(Shape{3, 2});
  const DenseTensor y = attention_forward(x, zero, zero, wv, 2.0);
  const DenseTensor xv = matmul(x, wv);
  for (index_t j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (index_t i = 0; i < 4; ++i) mean += xv.at({i, j});
    mean /= 4.0;
    for (index_t i = 0; i < 4; ++i) CHECK(y.at({i, j}) == doctest::Approx(mean).epsilon(1e-13));
  }
}

TEST_CASE("single-step attention is the value transform") {
  Rng rng(84);
  const DenseTensor x = random_tensor(rng, Shape{1, 3});
  const DenseTensor wq = random_tensor(rng, Shape{3, 2});
  const DenseTensor wk = random_tensor(rng, Shape{3, 2});
  const DenseTensor wv = random_tensor(rng, Shape{3, 2});
  const DenseTensor y = attention_forward(x, wq, wk, wv, 2.0);
  CHECK(max_abs_diff(y, matmul(x, wv)) < 1e-15);
}

TEST_CASE("unrolled recurrence basics") {
  Rng rng(85);
  const DenseTensor x = random_tensor(rng, Shape{3, 2});
  const DenseTensor wx = random_tensor(rng, Shape{2, 2});
  SUBCASE("zero recurrent weight gives independent rows") {
    const DenseTensor y = rnn_unrolled(x, DenseTensor(Shape{2, 2}), wx);
    for (index_t t = 0; t < 3; ++t)
      for (index_t k = 0; k < 2; ++k) {
        double expected = 0.0;
        for (index_t j = 0; j < 2; ++j) expected += wx.at({k, j}) * x.at({t, j});
        CHECK(y.at({t, k}) == doctest::Approx(expected).epsilon(1e-14));
      }
  }
  SUBCASE("identity weights accumulate a running sum of scalar inputs") {
    const DenseTensor xs(Shape{4, 1}, {1.0, 2.0, 3.0, 4.0});
    const DenseTensor y =
        rnn_unrolled(xs, DenseTensor::identity(1), DenseTensor::identity(1));
    CHECK(y.at({0, 0}) == 1.0);
    CHECK(y.at({1, 0}) == 3.0);
    CHECK(y.at({2, 0}) == 6.0);
    CHECK(y.at({3, 0}) == 10.0);
  }
}

TEST_CASE("unrolled recurrence equals the explicit power expansion") {
  Rng rng(86);
  const index_t steps = 4, hidden = 3, in = 2;
  const DenseTensor x = random_tensor(rng, Shape{steps, in});
  const DenseTensor wr = random_tensor(rng, Shape{hidden, hidden}, -0.5, 0.5);
  const DenseTensor wx = random_tensor(rng, Shape{hidden, in});
  const DenseTensor y = rnn_unrolled(x, wr, wx);
  // y_i = sum_j Wr^(i-j) Wx x_j
  for (index_t t = 0; t < steps; ++t) {
    DenseTensor expected(Shape{hidden});
    for (index_t j = 0; j <= t; ++j) {
      DenseTensor term(Shape{hidden});
      for (index_t k = 0; k < hidden; ++k) {
        double acc = 0.0;
        for (index_t f = 0; f < in; ++f) acc += wx.at({k, f}) * x.at({j, f});
        term[k] = acc;
      }
      for (index_t power = 0; power < t - j; ++power) {
        DenseTensor next(Shape{hidden});
        for (index_t k = 0; k < hidden; ++k) {
          double acc = 0.0;
          for (index_t l = 0; l < hidden; ++l) acc += wr.at({k, l}) * term[l];
          next[k] = acc;
        }
        term = next;
      }
      expected = add(expected, term);
    }
    for (index_t k = 0; k < hidden; ++k)
      CHECK(y.at({t, k}) == doctest::Approx(expected[k]).epsilon(1e-11));
  }
}

TEST_CASE("closed-form recurrence rejects non-idempotent weights") {
  Rng rng(87);
  const DenseTensor w1 = random_tensor(rng, Shape{3, 3});  // almost surely not idempotent
  const DenseTensor wx = random_tensor(rng, Shape{3, 2});
  const DenseTensor x = random_tensor(rng, Shape{4, 2});
  CHECK_THROWS_AS(rnn_closed_form(x, w1, wx, 0.5), std::invalid_argument);
}

TEST_CASE("closed-form recurrence with a single time step is the preprocessed input") {
  Rng rng(88);
  const DenseTensor x = random_tensor(rng, Shape{1, 3});
  const DenseTensor wx = random_tensor(rng, Shape{2, 3});
  const DenseTensor y = rnn_closed_form(x, DenseTensor::identity(2), wx, 0.9);
  CHECK(max_abs_diff(y, matmul(x, transpose(wx))) == 0.0);
}

TEST_CASE("tt dense layer basics") {
  Rng rng(89);
  const TTOperator identity = TTOperator::identity({2, 3});
  const DenseTensor x = random_tensor(rng, Shape{2, 3});
  const DenseTensor y = tt_dense_layer(x, identity, std::nullopt, ActivationKind::identity);
  CHECK(max_abs_diff(y, x) == 0.0);
}

TEST_CASE("tt dense layer equals the dense layer with the reconstructed matrix") {
  Rng rng(90);
  std::vector<DenseTensor> cores;
  cores.push_back(random_tensor(rng, Shape{1, 2, 3, 2}));
  cores.push_back(random_tensor(rng, Shape{2, 3, 2, 1}));
  const TTOperator op(std::move(cores));
  const DenseTensor x = random_tensor(rng, Shape{3, 2});
  const DenseTensor bias = random_tensor(rng, Shape{6});
  const DenseTensor via_tt = tt_dense_layer(x, op, bias, ActivationKind::tanh);
  const DenseTensor w = tt_reconstruct(op);
  DenseTensor dense = vectorize(matmul(w, matricize(vectorize(x), 1)));
  dense = apply_activation(ActivationKind::tanh, add(dense, bias));
  CHECK(max_abs_diff(vectorize(via_tt), dense) < 1e-10);
}

TEST_CASE("equivalence suite passes") {
  const auto reports = run_equivalence_suite(20240801);
  CHECK(reports.size() == 6);
  for (const auto& r : reports) {
    INFO(r.name, " max error ", r.max_abs_error, " tol ", r.tolerance);
    CHECK(r.pass);
  }
}

TEST_CASE("rnn closed form tracks the unrolled recurrence within 1e-8") {
  const auto report = check_rnn_equivalence(7, 50);
  CHECK(report.pass);
  CHECK(report.max_abs_error < 1e-8);
}

TEST_CASE("identity-constrained closed form is exactly the graph convolution form") {
  const auto report = check_rnn_gcn_reduction(9, 20);
  CHECK(report.pass);
  CHECK(report.max_abs_error == 0.0);
}
