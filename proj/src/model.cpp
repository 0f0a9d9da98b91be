#include "gtn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace gtn {

using detail::require;

namespace init {

void glorot(Rng& rng, DenseTensor& w, index_t fan_in, index_t fan_out) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (index_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-a, a);
}

}  // namespace init

// -- Layer ---------------------------------------------------------------------

index_t Layer::parameter_count() {
  index_t count = 0;
  for (const Parameter* p : parameters()) count += p->value.size();
  return count;
}

void Layer::apply_name_prefix(const std::string& prefix) {
  for (Parameter* p : parameters()) p->name = prefix + p->name;
}

// -- DenseLayer ------------------------------------------------------------------

DenseLayer::DenseLayer(index_t out_dim, index_t in_dim, bool with_bias)
    : weight_{"weight", DenseTensor(Shape{out_dim, in_dim})} {
  if (with_bias) bias_ = Parameter{"bias", DenseTensor(Shape{out_dim})};
}

DenseTensor DenseLayer::forward(const DenseTensor& x, LayerCache* cache) const {
  require(x.order() == 1 && x.size() == weight_.value.dim(2),
          "dense: input must be a vector of length " + std::to_string(weight_.value.dim(2)));
  if (cache) cache->input = x;
  const index_t rows = weight_.value.dim(1), cols = weight_.value.dim(2);
  DenseTensor y(Shape{rows});
  for (index_t i = 0; i < rows; ++i) {
    double acc = bias_ ? bias_->value[i] : 0.0;
    for (index_t j = 0; j < cols; ++j) acc += weight_.value[i * cols + j] * x[j];
    y[i] = acc;
  }
  return y;
}

LayerGrads DenseLayer::backward(const LayerCache& cache, const DenseTensor& dy) const {
  const DenseTensor& x = cache.input;
  const index_t rows = weight_.value.dim(1), cols = weight_.value.dim(2);
  LayerGrads g;
  DenseTensor dw(Shape{rows, cols});
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j) dw[i * cols + j] = dy[i] * x[j];
  g.dparams.push_back(std::move(dw));
  if (bias_) g.dparams.push_back(dy);
  DenseTensor dx(Shape{cols});
  for (index_t j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (index_t i = 0; i < rows; ++i) acc += weight_.value[i * cols + j] * dy[i];
    dx[j] = acc;
  }
  g.dx = std::move(dx);
  return g;
}

std::vector<Parameter*> DenseLayer::parameters() {
  std::vector<Parameter*> out{&weight_};
  if (bias_) out.push_back(&*bias_);
  return out;
}

void DenseLayer::initialize(Rng& rng) {
  init::glorot(rng, weight_.value, weight_.value.dim(2), weight_.value.dim(1));
  if (bias_)
    for (index_t i = 0; i < bias_->value.size(); ++i) bias_->value[i] = 0.0;
}

// -- ActivationLayer ---------------------------------------------------------------

DenseTensor ActivationLayer::forward(const DenseTensor& x, LayerCache* cache) const {
  DenseTensor y = apply_activation(activation_, x);
  if (cache) {
    cache->input = x;
    cache->extras = {y};
  }
  return y;
}

LayerGrads ActivationLayer::backward(const LayerCache& cache, const DenseTensor& dy) const {
  const DenseTensor& x = cache.input;
  const DenseTensor& y = cache.extras.front();
  LayerGrads g;
  DenseTensor dx = dy;
  switch (activation_) {
    case ActivationKind::identity:
      break;
    case ActivationKind::relu:
      for (index_t i = 0; i < dx.size(); ++i) dx[i] = x[i] > 0.0 ? dx[i] : 0.0;
      break;
    case ActivationKind::tanh:
      for (index_t i = 0; i < dx.size(); ++i) dx[i] *= 1.0 - y[i] * y[i];
      break;
    case ActivationKind::sigmoid:
      for (index_t i = 0; i < dx.size(); ++i) dx[i] *= y[i] * (1.0 - y[i]);
      break;
    case ActivationKind::softmax_last_mode: {
      const index_t last = y.dim(y.order());
      const index_t slices = y.size() / last;
      for (index_t s = 0; s < slices; ++s) {
        const double* yr = y.data() + s * last;
        double* dr = dx.data() + s * last;
        double dot = 0.0;
        for (index_t j = 0; j < last; ++j) dot += dr[j] * yr[j];
        for (index_t j = 0; j < last; ++j) dr[j] = yr[j] * (dr[j] - dot);
      }
      break;
    }
  }
  g.dx = std::move(dx);
  return g;
}

// -- FlattenLayer -------------------------------------------------------------------

DenseTensor FlattenLayer::forward(const DenseTensor& x, LayerCache* cache) const {
  if (cache) cache->input = x;
  return vectorize(x);
}

LayerGrads FlattenLayer::backward(const LayerCache& cache, const DenseTensor& dy) const {
  LayerGrads g;
  g.dx = reshape(dy, cache.input.shape());
  return g;
}

// -- MatricizeLayer -----------------------------------------------------------------

DenseTensor MatricizeLayer::forward(const DenseTensor& x, LayerCache* cache) const {
  if (cache) cache->input = x;
  return matricize(x, mode_);
}

LayerGrads MatricizeLayer::backward(const LayerCache& cache, const DenseTensor& dy) const {
  LayerGrads g;
  g.dx = dematricize(dy, mode_, cache.input.shape());
  return g;
}

// -- GraphTensorLayer ----------------------------------------------------------------

GraphTensorLayer::GraphTensorLayer(std::vector<GraphShiftOperator> gsos,
                                   std::vector<std::pair<index_t, index_t>> weight_dims,
                                   bool with_bias)
    : gsos_(std::move(gsos)) {
  for (const auto& s : gsos_) {
    require(s.matrix.order() == 2 && s.matrix.dim(1) == s.matrix.dim(2),
            "gtn layer: graph shift operators must be square");
  }
  weights_.reserve(weight_dims.size());
  for (std::size_t m = 0; m < weight_dims.size(); ++m) {
    const auto [k, j] = weight_dims[m];
    weights_.push_back(
        Parameter{"weight" + std::to_string(m + 1), DenseTensor(Shape{k, j})});
  }
  if (with_bias) bias_ = Parameter{"bias", DenseTensor(output_shape())};
}

Shape GraphTensorLayer::output_shape() const {
  std::vector<index_t> dims;
  for (const auto& s : gsos_) dims.push_back(s.size());
  for (const auto& w : weights_) dims.push_back(w.value.dim(1));
  return Shape(dims);
}

DenseTensor GraphTensorLayer::forward(const DenseTensor& x, LayerCache* cache) const {
  const index_t n = static_cast<index_t>(gsos_.size());
  const index_t m = static_cast<index_t>(weights_.size());
  require(x.order() == n + m, "gtn layer: input order mismatch");
  if (cache) cache->input = x;
  DenseTensor out = x;
  for (index_t i = 0; i < n; ++i)
    out = mode_n_product(out, i + 1, gsos_[static_cast<std::size_t>(i)].matrix);
  for (index_t i = 0; i < m; ++i)
    out = mode_n_product(out, n + i + 1, weights_[static_cast<std::size_t>(i)].value);
  if (bias_) out = add(out, bias_->value);
  return out;
}

LayerGrads GraphTensorLayer::backward(const LayerCache& cache, const DenseTensor& dy) const {
  const index_t n = static_cast<index_t>(gsos_.size());
  const index_t m = static_cast<index_t>(weights_.size());
  const DenseTensor& x = cache.input;
  LayerGrads g;

  // One weight gradient per feature mode: unfold the upstream gradient and the
  // input with every other factor applied along that mode.
  for (index_t w = 0; w < m; ++w) {
    DenseTensor z = x;
    for (index_t i = 0; i < n; ++i)
      z = mode_n_product(z, i + 1, gsos_[static_cast<std::size_t>(i)].matrix);
    for (index_t i = 0; i < m; ++i) {
      if (i == w) continue;
      z = mode_n_product(z, n + i + 1, weights_[static_cast<std::size_t>(i)].value);
    }
    const DenseTensor dy_mat = matricize(dy, n + w + 1);
    const DenseTensor z_mat = matricize(z, n + w + 1);
    g.dparams.push_back(matmul(dy_mat, transpose(z_mat)));
  }
  if (bias_) g.dparams.push_back(dy);

  DenseTensor dx = dy;
  for (index_t i = 0; i < n; ++i)
    dx = mode_n_product(dx, i + 1, transpose(gsos_[static_cast<std::size_t>(i)].matrix));
  for (index_t i = 0; i < m; ++i)
    dx = mode_n_product(dx, n + i + 1, transpose(weights_[static_cast<std::size_t>(i)].value));
  g.dx = std::move(dx);
  return g;
}

std::vector<Parameter*> GraphTensorLayer::parameters() {
  std::vector<Parameter*> out;
  for (auto& w : weights_) out.push_back(&w);
  if (bias_) out.push_back(&*bias_);
  return out;
}

void GraphTensorLayer::initialize(Rng& rng) {
  for (auto& w : weights_) init::glorot(rng, w.value, w.value.dim(2), w.value.dim(1));
  if (bias_)
    for (index_t i = 0; i < bias_->value.size(); ++i) bias_->value[i] = 0.0;
}

// -- TTDenseLayer ---------------------------------------------------------------------

TTDenseLayer::TTDenseLayer(const TensorizationPlan& plan, std::vector<index_t> interior_ranks,
                           bool with_bias) {
  const index_t n = plan.order();
  require(static_cast<index_t>(interior_ranks.size()) == n - 1,
          "tt_dense layer: need one rank per interior bond");
  index_t prev = 1;
  for (index_t k = 0; k < n; ++k) {
    const index_t next = (k == n - 1) ? 1 : interior_ranks[static_cast<std::size_t>(k)];
    cores_.push_back(Parameter{
        "core" + std::to_string(k + 1),
        DenseTensor(Shape{prev, plan.row_factors[static_cast<std::size_t>(k)],
                          plan.col_factors[static_cast<std::size_t>(k)], next})});
    prev = next;
  }
  if (with_bias) bias_ = Parameter{"bias", DenseTensor(Shape{plan.matrix_rows()})};
}

TTDenseLayer::TTDenseLayer(TTOperator op, bool with_bias) {
  for (index_t k = 0; k < op.core_count(); ++k)
    cores_.push_back(Parameter{"core" + std::to_string(k + 1), op.core(k)});
  if (with_bias) {
    bias_ = Parameter{"bias", DenseTensor(Shape{op.plan().matrix_rows()})};
  }
}

TTOperator TTDenseLayer::operator_view() const {
  std::vector<DenseTensor> cores;
  cores.reserve(cores_.size());
  for (const auto& c : cores_) cores.push_back(c.value);
  return TTOperator(std::move(cores));
}

index_t TTDenseLayer::weight_param_count() const {
  index_t count = 0;
  for (const auto& c : cores_) count += c.value.size();
  return count;
}

DenseTensor TTDenseLayer::forward(const DenseTensor& x, LayerCache* cache) const {
  const TTOperator op = operator_view();
  std::vector<DenseTensor> carries;
  DenseTensor out = tt_apply(op, x, cache ? &carries : nullptr);
  if (cache) {
    cache->input = x;
    cache->extras = std::move(carries);
  }
  if (bias_) out = add(out, reshape(bias_->value, out.shape()));
  return out;
}

LayerGrads TTDenseLayer::backward(const LayerCache& cache, const DenseTensor& dy) const {
  const index_t n_cores = static_cast<index_t>(cores_.size());
  LayerGrads g;
  g.dparams.resize(static_cast<std::size_t>(n_cores) + (bias_ ? 1 : 0));
  if (bias_) g.dparams.back() = vectorize(dy);

  // Adjoint of the tt_apply sweep, walking the cached carries backwards.
  DenseTensor d_carry = reshape(dy, cache.extras.back().shape());
  for (index_t n = n_cores - 1; n >= 0; --n) {
    const DenseTensor& core = cores_[static_cast<std::size_t>(n)].value;
    const index_t rp = core.dim(1), k = core.dim(2), j = core.dim(3), rn = core.dim(4);
    const DenseTensor& carry_in = cache.extras[static_cast<std::size_t>(n)];
    const index_t k_prefix = carry_in.dim(1);
    const index_t j_block = carry_in.dim(3);  // j * j_suffix
    const index_t j_suffix = j_block / j;

    DenseTensor d_core(core.shape());
    DenseTensor d_in(carry_in.shape());
    for (index_t kp = 0; kp < k_prefix; ++kp) {
      for (index_t kk = 0; kk < k; ++kk) {
        for (index_t rr = 0; rr < rn; ++rr) {
          for (index_t js = 0; js < j_suffix; ++js) {
            const double grad_out = d_carry[((kp * k + kk) * rn + rr) * j_suffix + js];
            if (grad_out == 0.0) continue;
            for (index_t r = 0; r < rp; ++r) {
              const index_t in_base = (kp * rp + r) * j_block + js;
              const index_t g_base = (r * k + kk) * j;
              for (index_t jj = 0; jj < j; ++jj) {
                d_core[(g_base + jj) * rn + rr] += carry_in[in_base + jj * j_suffix] * grad_out;
                d_in[in_base + jj * j_suffix] += core[(g_base + jj) * rn + rr] * grad_out;
              }
            }
          }
        }
      }
    }
    g.dparams[static_cast<std::size_t>(n)] = std::move(d_core);
    d_carry = std::move(d_in);
  }
  g.dx = reshape(d_carry, cache.input.shape());
  return g;
}

std::vector<Parameter*> TTDenseLayer::parameters() {
  std::vector<Parameter*> out;
  for (auto& c : cores_) out.push_back(&c);
  if (bias_) out.push_back(&*bias_);
  return out;
}

void TTDenseLayer::initialize(Rng& rng) {
  for (auto& c : cores_) {
    const index_t rows = c.value.dim(1) * c.value.dim(2);
    const index_t cols = c.value.dim(3) * c.value.dim(4);
    init::glorot(rng, c.value, cols, rows);
  }
  // Rescale so the reconstructed operator has unit-order spectral norm; keeps
  // deep core chains from exploding or vanishing.
  const TTOperator op = operator_view();
  const DenseTensor w = tt_reconstruct(op);
  const index_t rows = w.dim(1), cols = w.dim(2);
  std::vector<double> v(static_cast<std::size_t>(cols), 1.0 / std::sqrt(double(cols)));
  double sigma_sq = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<double> u(static_cast<std::size_t>(rows), 0.0);
    for (index_t i = 0; i < rows; ++i)
      for (index_t j = 0; j < cols; ++j) u[static_cast<std::size_t>(i)] += w[i * cols + j] * v[static_cast<std::size_t>(j)];
    std::vector<double> v2(static_cast<std::size_t>(cols), 0.0);
    for (index_t i = 0; i < rows; ++i)
      for (index_t j = 0; j < cols; ++j) v2[static_cast<std::size_t>(j)] += w[i * cols + j] * u[static_cast<std::size_t>(i)];
    double norm = 0.0;
    for (double t : v2) norm += t * t;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    sigma_sq = norm;  // ||W^T W v|| -> largest eigenvalue of W^T W at convergence
    for (std::size_t t = 0; t < v2.size(); ++t) v[t] = v2[t] / norm;
  }
  const double sigma = std::sqrt(sigma_sq);
  if (sigma > 0.0) {
    const double factor = std::pow(1.0 / sigma, 1.0 / static_cast<double>(cores_.size()));
    for (auto& c : cores_)
      for (index_t i = 0; i < c.value.size(); ++i) c.value[i] *= factor;
  }
  if (bias_)
    for (index_t i = 0; i < bias_->value.size(); ++i) bias_->value[i] = 0.0;
}

// -- AttentionLayer -----------------------------------------------------------------

AttentionLayer::AttentionLayer(index_t feature_dim, index_t head_dim)
    : wq_{"wq", DenseTensor(Shape{feature_dim, head_dim})},
      wk_{"wk", DenseTensor(Shape{feature_dim, head_dim})},
      wv_{"wv", DenseTensor(Shape{feature_dim, head_dim})},
      dk_(static_cast<double>(head_dim)) {}

DenseTensor AttentionLayer::forward(const DenseTensor& x, LayerCache* cache) const {
  require(x.order() == 2 && x.dim(2) == wq_.value.dim(1),
          "attention layer: input must be (steps x features)");
  const DenseTensor q = matmul(x, wq_.value);
  const DenseTensor k = matmul(x, wk_.value);
  const DenseTensor v = matmul(x, wv_.value);
  DenseTensor scores = matmul(q, transpose(k));
  const double inv_scale = 1.0 / std::sqrt(dk_);
  for (index_t i = 0; i < scores.size(); ++i) scores[i] *= inv_scale;
  const DenseTensor s = apply_activation(ActivationKind::softmax_last_mode, scores);
  if (cache) {
    cache->input = x;
    cache->extras = {q, k, v, s};
  }
  return matmul(s, v);
}

LayerGrads AttentionLayer::backward(const LayerCache& cache, const DenseTensor& dy) const {
  const DenseTensor& x = cache.input;
  const DenseTensor& q = cache.extras[0];
  const DenseTensor& k = cache.extras[1];
  const DenseTensor& v = cache.extras[2];
  const DenseTensor& s = cache.extras[3];
  const double inv_scale = 1.0 / std::sqrt(dk_);

  const DenseTensor dv = matmul(transpose(s), dy);
  DenseTensor ds = matmul(dy, transpose(v));
  // softmax rows, then the score scaling
  const index_t rows = s.dim(1), cols = s.dim(2);
  for (index_t i = 0; i < rows; ++i) {
    double dot = 0.0;
    for (index_t j = 0; j < cols; ++j) dot += ds[i * cols + j] * s[i * cols + j];
    for (index_t j = 0; j < cols; ++j)
      ds[i * cols + j] = s[i * cols + j] * (ds[i * cols + j] - dot) * inv_scale;
  }
  const DenseTensor dq = matmul(ds, k);
  const DenseTensor dk_grad = matmul(transpose(ds), q);

  LayerGrads g;
  g.dparams.push_back(matmul(transpose(x), dq));
  g.dparams.push_back(matmul(transpose(x), dk_grad));
  g.dparams.push_back(matmul(transpose(x), dv));
  DenseTensor dx = matmul(dq, transpose(wq_.value));
  dx = add(dx, matmul(dk_grad, transpose(wk_.value)));
  dx = add(dx, matmul(dv, transpose(wv_.value)));
  g.dx = std::move(dx);
  return g;
}

std::vector<Parameter*> AttentionLayer::parameters() { return {&wq_, &wk_, &wv_}; }

void AttentionLayer::initialize(Rng& rng) {
  init::glorot(rng, wq_.value, wq_.value.dim(1), wq_.value.dim(2));
  init::glorot(rng, wk_.value, wk_.value.dim(1), wk_.value.dim(2));
  init::glorot(rng, wv_.value, wv_.value.dim(1), wv_.value.dim(2));
}

// -- CirculantLayer -----------------------------------------------------------------

CirculantLayer::CirculantLayer(index_t size, index_t kernel_size)
    : kernel_{"kernel", DenseTensor(Shape{kernel_size})}, size_(size) {
  require(size > kernel_size && kernel_size >= 1, "circulant layer: requires I > P >= 1");
}

DenseTensor CirculantLayer::forward(const DenseTensor& x, LayerCache* cache) const {
  require(x.order() == 1 && x.size() == size_, "circulant layer: input length mismatch");
  if (cache) cache->input = x;
  const index_t taps = kernel_.value.size();
  DenseTensor y(Shape{size_});
  for (index_t i = 0; i < size_; ++i) {
    double acc = 0.0;
    for (index_t p = 0; p < taps; ++p) acc += kernel_.value[p] * x[(i + p) % size_];
    y[i] = acc;
  }
  return y;
}

LayerGrads CirculantLayer::backward(const LayerCache& cache, const DenseTensor& dy) const {
  const DenseTensor& x = cache.input;
  const index_t taps = kernel_.value.size();
  LayerGrads g;
  DenseTensor dk(Shape{taps});
  for (index_t p = 0; p < taps; ++p) {
    double acc = 0.0;
    for (index_t i = 0; i < size_; ++i) acc += dy[i] * x[(i + p) % size_];
    dk[p] = acc;
  }
  g.dparams.push_back(std::move(dk));
  DenseTensor dx(Shape{size_});
  for (index_t i = 0; i < size_; ++i) {
    for (index_t p = 0; p < taps; ++p) dx[(i + p) % size_] += kernel_.value[p] * dy[i];
  }
  g.dx = std::move(dx);
  return g;
}

std::vector<Parameter*> CirculantLayer::parameters() { return {&kernel_}; }

void CirculantLayer::initialize(Rng& rng) {
  init::glorot(rng, kernel_.value, kernel_.value.size(), 1);
}

// -- RecurrentLayer ------------------------------------------------------------------

RecurrentLayer::RecurrentLayer(index_t hidden_dim, index_t in_dim, bool with_bias)
    : wr_{"wr", DenseTensor(Shape{hidden_dim, hidden_dim})},
      wx_{"wx", DenseTensor(Shape{hidden_dim, in_dim})} {
  if (with_bias) bias_ = Parameter{"bias", DenseTensor(Shape{hidden_dim})};
}

DenseTensor RecurrentLayer::forward(const DenseTensor& x, LayerCache* cache) const {
  const index_t hidden = wr_.value.dim(1);
  const index_t in = wx_.value.dim(2);
  require(x.order() == 2 && x.dim(2) == in, "rnn layer: input must be (steps x features)");
  const index_t steps = x.dim(1);
  DenseTensor y(Shape{steps, hidden});
  for (index_t t = 0; t < steps; ++t) {
    for (index_t k = 0; k < hidden; ++k) {
      double acc = bias_ ? bias_->value[k] : 0.0;
      if (t > 0) {
        for (index_t l = 0; l < hidden; ++l)
          acc += wr_.value[k * hidden + l] * y[(t - 1) * hidden + l];
      }
      for (index_t j = 0; j < in; ++j) acc += wx_.value[k * in + j] * x[t * in + j];
      y[t * hidden + k] = acc;
    }
  }
  if (cache) {
    cache->input = x;
    cache->extras = {y};
  }
  return y;
}

LayerGrads RecurrentLayer::backward(const LayerCache& cache, const DenseTensor& dy) const {
  const DenseTensor& x = cache.input;
  const DenseTensor& y = cache.extras.front();
  const index_t hidden = wr_.value.dim(1);
  const index_t in = wx_.value.dim(2);
  const index_t steps = x.dim(1);

  LayerGrads g;
  DenseTensor dwr(wr_.value.shape());
  DenseTensor dwx(wx_.value.shape());
  DenseTensor db(Shape{hidden});
  DenseTensor dx(x.shape());
  std::vector<double> delta(static_cast<std::size_t>(hidden), 0.0);
  std::vector<double> carried(static_cast<std::size_t>(hidden), 0.0);
  for (index_t t = steps - 1; t >= 0; --t) {
    for (index_t k = 0; k < hidden; ++k)
      delta[static_cast<std::size_t>(k)] = dy[t * hidden + k] + carried[static_cast<std::size_t>(k)];
    for (index_t k = 0; k < hidden; ++k) {
      const double d = delta[static_cast<std::size_t>(k)];
      if (t > 0) {
        for (index_t l = 0; l < hidden; ++l) dwr[k * hidden + l] += d * y[(t - 1) * hidden + l];
      }
      for (index_t j = 0; j < in; ++j) {
        dwx[k * in + j] += d * x[t * in + j];
        dx[t * in + j] += wx_.value[k * in + j] * d;
      }
      db[k] += d;
    }
    // delta for step t-1 via the recurrent weight
    for (index_t l = 0; l < hidden; ++l) {
      double acc = 0.0;
      for (index_t k = 0; k < hidden; ++k)
        acc += wr_.value[k * hidden + l] * delta[static_cast<std::size_t>(k)];
      carried[static_cast<std::size_t>(l)] = acc;
    }
  }
  g.dparams.push_back(std::move(dwr));
  g.dparams.push_back(std::move(dwx));
  if (bias_) g.dparams.push_back(std::move(db));
  g.dx = std::move(dx);
  return g;
}

std::vector<Parameter*> RecurrentLayer::parameters() {
  std::vector<Parameter*> out{&wr_, &wx_};
  if (bias_) out.push_back(&*bias_);
  return out;
}

void RecurrentLayer::initialize(Rng& rng) {
  init::glorot(rng, wr_.value, wr_.value.dim(2), wr_.value.dim(1));
  init::glorot(rng, wx_.value, wx_.value.dim(2), wx_.value.dim(1));
  if (bias_)
    for (index_t i = 0; i < bias_->value.size(); ++i) bias_->value[i] = 0.0;
}

// -- Model ------------------------------------------------------------------------------

Layer& Model::add(std::unique_ptr<Layer> layer) {
  layer->apply_name_prefix("l" + std::to_string(layers_.size()) + "." + layer->kind() + ".");
  layers_.push_back(std::move(layer));
  return *layers_.back();
}

DenseTensor Model::forward(const DenseTensor& x, std::vector<LayerCache>* caches) const {
  if (caches) {
    caches->clear();
    caches->resize(layers_.size());
  }
  DenseTensor out = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out = layers_[i]->forward(out, caches ? &(*caches)[i] : nullptr);
  }
  return out;
}

Model::Backprop Model::backward(const std::vector<LayerCache>& caches,
                                const DenseTensor& dLdY) const {
  require(caches.size() == layers_.size(),
          "Model::backward: forward caches missing (run forward with caches first)");
  std::vector<std::vector<DenseTensor>> per_layer(layers_.size());
  DenseTensor grad = dLdY;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    LayerGrads g = layers_[i]->backward(caches[i], grad);
    per_layer[i] = std::move(g.dparams);
    grad = std::move(g.dx);
  }
  Backprop result;
  result.dx = std::move(grad);
  for (auto& dp : per_layer)
    for (auto& t : dp) result.gradients.push_back(std::move(t));
  return result;
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_)
    for (Parameter* p : l->parameters()) out.push_back(p);
  return out;
}

index_t Model::trainable_param_count() const {
  index_t count = 0;
  for (const auto& l : layers_) count += const_cast<Layer&>(*l).parameter_count();
  return count;
}

void Model::initialize(Rng& rng) {
  for (auto& l : layers_) l->initialize(rng);
}

}  // namespace gtn
