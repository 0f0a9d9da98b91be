#include "gtn/equivalence.hpp"

#include <cmath>

#include "gtn/graphs.hpp"
#include "gtn/layers.hpp"
#include "gtn/rng.hpp"

namespace gtn {

namespace {

DenseTensor random_tensor(Rng& rng, const Shape& shape, double lo = -1.0, double hi = 1.0) {
  DenseTensor t(shape);
  for (index_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

index_t random_dim(Rng& rng, index_t lo, index_t hi) {
  return lo + static_cast<index_t>(rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
}

/// Orthogonal projection onto the span of r random vectors (Gram-Schmidt);
/// idempotent up to roundoff.
DenseTensor random_projection(Rng& rng, index_t dim, index_t rank) {
  std::vector<std::vector<double>> basis;
  while (static_cast<index_t>(basis.size()) < rank) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    for (const auto& b : basis) {
      double dot = 0.0;
      for (index_t i = 0; i < dim; ++i) dot += v[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
      for (index_t i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] -= dot * b[static_cast<std::size_t>(i)];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;  // degenerate draw, try again
    for (auto& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  DenseTensor p(Shape{dim, dim});
  for (const auto& b : basis)
    for (index_t i = 0; i < dim; ++i)
      for (index_t j = 0; j < dim; ++j)
        p[i * dim + j] += b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
  return p;
}

EquivalenceReport finish(std::string name, index_t instances, double err, double tol) {
  EquivalenceReport r;
  r.name = std::move(name);
  r.instances = instances;
  r.max_abs_error = err;
  r.tolerance = tol;
  r.pass = err <= tol;
  return r;
}

}  // namespace

EquivalenceReport check_dnn_equivalence(std::uint64_t seed, index_t instances) {
  Rng rng(seed);
  double worst = 0.0;
  for (index_t i = 0; i < instances; ++i) {
    const index_t k = random_dim(rng, 1, 6);
    const index_t j = random_dim(rng, 1, 6);
    const DenseTensor w = random_tensor(rng, Shape{k, j});
    const DenseTensor x = random_tensor(rng, Shape{j});
    const DenseTensor direct = dnn_forward(x, w);
    GTNLayerSpec layer;
    layer.feature_weights.push_back(w);
    const DenseTensor via_gtn = gtn_forward(x, DataTensorMeta{0, 1}, layer);
    worst = std::max(worst, max_abs_diff(direct, via_gtn));
  }
  return finish("dnn", instances, worst, 1e-12);
}

EquivalenceReport check_gcn_equivalence(std::uint64_t seed, index_t instances) {
  Rng rng(seed);
  double worst = 0.0;
  for (index_t i = 0; i < instances; ++i) {
    const index_t nodes = random_dim(rng, 2, 6);
    const index_t j = random_dim(rng, 1, 5);
    const index_t k = random_dim(rng, 1, 5);
    DenseTensor a(Shape{nodes, nodes});
    for (index_t r = 0; r < nodes; ++r)
      for (index_t c = r + 1; c < nodes; ++c) {
        const double w = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.1, 1.0);
        a[r * nodes + c] = w;
        a[c * nodes + r] = w;
      }
    const DenseTensor x = random_tensor(rng, Shape{nodes, j});
    const DenseTensor w = random_tensor(rng, Shape{j, k});
    const DenseTensor direct = gcn_forward(x, a, w);
    GTNLayerSpec layer;
    layer.domain_gsos.push_back(gso_gcn(a));
    layer.feature_weights.push_back(transpose(w));
    const DenseTensor via_gtn = gtn_forward(x, DataTensorMeta{1, 1}, layer);
    worst = std::max(worst, max_abs_diff(direct, via_gtn));
  }
  return finish("gcn", instances, worst, 1e-12);
}

EquivalenceReport check_cnn_equivalence(std::uint64_t seed, index_t instances) {
  Rng rng(seed);
  double worst = 0.0;
  for (index_t i = 0; i < instances; ++i) {
    const index_t taps = random_dim(rng, 1, 4);
    const index_t size = random_dim(rng, taps + 1, 10);
    const DenseTensor x = random_tensor(rng, Shape{size});
    const DenseTensor kernel = random_tensor(rng, Shape{taps});
    const DenseTensor direct = cnn_forward(x, kernel);
    GTNLayerSpec layer;
    layer.domain_gsos.push_back(gso_circulant(kernel, size));
    const DenseTensor via_gtn = gtn_forward(x, DataTensorMeta{1, 0}, layer);
    worst = std::max(worst, max_abs_diff(direct, via_gtn));
  }
  return finish("cnn", instances, worst, 1e-12);
}

EquivalenceReport check_attention_equivalence(std::uint64_t seed, index_t instances) {
  Rng rng(seed);
  double worst = 0.0;
  for (index_t i = 0; i < instances; ++i) {
    const index_t steps = random_dim(rng, 1, 5);
    const index_t j = random_dim(rng, 1, 4);
    const index_t k = random_dim(rng, 1, 4);
    const DenseTensor x = random_tensor(rng, Shape{steps, j});
    const DenseTensor wq = random_tensor(rng, Shape{j, k});
    const DenseTensor wk = random_tensor(rng, Shape{j, k});
    const DenseTensor wv = random_tensor(rng, Shape{j, k});
    const double dk = static_cast<double>(k);
    const DenseTensor direct = attention_forward(x, wq, wk, wv, dk);
    GTNLayerSpec layer;
    layer.domain_gsos.push_back(gso_attention(x, wq, wk, dk));
    layer.feature_weights.push_back(transpose(wv));
    const DenseTensor via_gtn = gtn_forward(x, DataTensorMeta{1, 1}, layer);
    worst = std::max(worst, max_abs_diff(direct, via_gtn));
  }
  return finish("attention", instances, worst, 1e-12);
}

EquivalenceReport check_rnn_equivalence(std::uint64_t seed, index_t instances) {
  Rng rng(seed);
  double worst = 0.0;
  for (index_t i = 0; i < instances; ++i) {
    const index_t steps = random_dim(rng, 1, 8);
    const index_t j = random_dim(rng, 1, 4);
    const index_t hidden = random_dim(rng, 1, 4);
    const index_t rank = random_dim(rng, 1, hidden);
    const double c = rng.uniform(0.2, 1.0);
    const DenseTensor w1 = random_projection(rng, hidden, rank);
    const DenseTensor wx = random_tensor(rng, Shape{hidden, j});
    const DenseTensor x = random_tensor(rng, Shape{steps, j});
    const DenseTensor unrolled = rnn_unrolled(x, scale(w1, c), wx);
    const DenseTensor closed = rnn_closed_form(x, w1, wx, c);
    worst = std::max(worst, max_abs_diff(unrolled, closed));
  }
  return finish("rnn", instances, worst, 1e-8);
}

EquivalenceReport check_rnn_gcn_reduction(std::uint64_t seed, index_t instances) {
  Rng rng(seed);
  double worst = 0.0;
  for (index_t i = 0; i < instances; ++i) {
    const index_t steps = random_dim(rng, 1, 8);
    const index_t j = random_dim(rng, 1, 4);
    const index_t hidden = random_dim(rng, 1, 4);
    const double c = rng.uniform(0.2, 1.0);
    const DenseTensor wx = random_tensor(rng, Shape{hidden, j});
    const DenseTensor x = random_tensor(rng, Shape{steps, j});
    const DenseTensor closed = rnn_closed_form(x, DenseTensor::identity(hidden), wx, c);
    // un-normalized graph convolution route: S Xt + Xt, i.e. (I + S) Xt
    const DenseTensor pre = matmul(x, transpose(wx));
    const GraphShiftOperator s = gso_time_decay(steps, c);
    const DenseTensor reduced = add(matmul(s.matrix, pre), pre);
    worst = std::max(worst, max_abs_diff(closed, reduced));
  }
  // applying the identity feature weight adds no rounding, so this is exact
  return finish("rnn_gcn_reduction", instances, worst, 0.0);
}

std::vector<EquivalenceReport> run_equivalence_suite(std::uint64_t seed) {
  return {
      check_dnn_equivalence(seed + 1),      check_gcn_equivalence(seed + 2),
      check_cnn_equivalence(seed + 3),      check_attention_equivalence(seed + 4),
      check_rnn_equivalence(seed + 5),      check_rnn_gcn_reduction(seed + 6),
  };
}

}  // namespace gtn
