#include "gtn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace gtn {

using detail::require;

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::relu: return "relu";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::softmax_last_mode: return "softmax_last_mode";
  }
  return "identity";
}

ActivationKind activation_from_string(const std::string& name) {
  if (name == "identity") return ActivationKind::identity;
  if (name == "relu") return ActivationKind::relu;
  if (name == "tanh") return ActivationKind::tanh;
  if (name == "sigmoid") return ActivationKind::sigmoid;
  if (name == "softmax_last_mode") return ActivationKind::softmax_last_mode;
  throw std::invalid_argument("unknown activation: " + name);
}

DenseTensor apply_activation(ActivationKind kind, const DenseTensor& x) {
  DenseTensor out = x;
  switch (kind) {
    case ActivationKind::identity:
      break;
    case ActivationKind::relu:
      for (index_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
      break;
    case ActivationKind::tanh:
      for (index_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
      break;
    case ActivationKind::sigmoid:
      for (index_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
      break;
    case ActivationKind::softmax_last_mode: {
      require(out.order() >= 1, "softmax_last_mode: needs at least one mode");
      const index_t last = out.dim(out.order());
      const index_t slices = out.size() / last;
      for (index_t s = 0; s < slices; ++s) {
        double* row = out.data() + s * last;
        double m = row[0];
        for (index_t j = 1; j < last; ++j) m = std::max(m, row[j]);
        double total = 0.0;
        for (index_t j = 0; j < last; ++j) {
          row[j] = std::exp(row[j] - m);
          total += row[j];
        }
        for (index_t j = 0; j < last; ++j) row[j] /= total;
      }
      break;
    }
  }
  return out;
}

DenseTensor gtn_forward(const DenseTensor& x, const DataTensorMeta& meta,
                        const GTNLayerSpec& layer) {
  require(meta.domain_modes >= 0 && meta.feature_modes >= 0,
          "gtn_forward: mode counts must be non-negative");
  require(meta.order() == x.order(),
          "gtn_forward: meta declares order " + std::to_string(meta.order()) +
              " but input has order " + std::to_string(x.order()));
  require(static_cast<index_t>(layer.domain_gsos.size()) == meta.domain_modes,
          "gtn_forward: need one graph shift operator per domain mode");
  require(static_cast<index_t>(layer.feature_weights.size()) == meta.feature_modes,
          "gtn_forward: need one weight matrix per feature mode");

  DenseTensor out = x;
  for (index_t n = 0; n < meta.domain_modes; ++n) {
    const GraphShiftOperator& s = layer.domain_gsos[static_cast<std::size_t>(n)];
    require(s.matrix.order() == 2 && s.matrix.dim(1) == s.matrix.dim(2),
            "gtn_forward: graph shift operator " + std::to_string(n + 1) + " must be square");
    require(s.size() == x.dim(n + 1), "gtn_forward: GSO " + std::to_string(n + 1) +
                                          " size does not match domain mode");
    out = mode_n_product(out, n + 1, s.matrix);
  }
  for (index_t m = 0; m < meta.feature_modes; ++m) {
    const DenseTensor& w = layer.feature_weights[static_cast<std::size_t>(m)];
    require(w.order() == 2, "gtn_forward: feature weights must be matrices");
    out = mode_n_product(out, meta.domain_modes + m + 1, w);
  }
  if (layer.bias) {
    require(layer.bias->shape() == out.shape(),
            "gtn_forward: bias shape " + layer.bias->shape().to_string() +
                " does not match output " + out.shape().to_string());
    out = add(out, *layer.bias);
  }
  return apply_activation(layer.activation, out);
}

DenseTensor dnn_forward(const DenseTensor& x, const DenseTensor& w) {
  require(x.order() == 1, "dnn_forward: input must be a vector");
  require(w.order() == 2 && w.dim(2) == x.size(), "dnn_forward: weight shape mismatch");
  const index_t rows = w.dim(1), cols = w.dim(2);
  DenseTensor y(Shape{rows});
  for (index_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (index_t j = 0; j < cols; ++j) acc += w[i * cols + j] * x[j];
    y[i] = acc;
  }
  return y;
}

DenseTensor gcn_forward(const DenseTensor& x, const DenseTensor& adjacency,
                        const DenseTensor& w) {
  require(x.order() == 2, "gcn_forward: input must be a graph signal matrix");
  require(w.order() == 2 && w.dim(1) == x.dim(2), "gcn_forward: weight shape mismatch");
  const GraphShiftOperator s = gso_gcn(adjacency);
  require(s.size() == x.dim(1), "gcn_forward: adjacency size does not match signals");
  return matmul(matmul(s.matrix, x), w);
}

DenseTensor cnn_forward(const DenseTensor& x, const DenseTensor& kernel) {
  require(x.order() == 1 && kernel.order() == 1, "cnn_forward: inputs must be vectors");
  const index_t size = x.size();
  const index_t taps = kernel.size();
  require(size > taps && taps >= 1, "cnn_forward: requires I > P >= 1");
  DenseTensor y(Shape{size});
  for (index_t i = 0; i < size; ++i) {
    double acc = 0.0;
    for (index_t p = 0; p < taps; ++p) acc += kernel[p] * x[(i + p) % size];
    y[i] = acc;
  }
  return y;
}

DenseTensor attention_forward(const DenseTensor& x, const DenseTensor& wq,
                              const DenseTensor& wk, const DenseTensor& wv, double dk) {
  require(x.order() == 2, "attention_forward: input must be order-2");
  require(wq.order() == 2 && wk.order() == 2 && wv.order() == 2,
          "attention_forward: weights must be matrices");
  require(wq.dim(1) == x.dim(2) && wk.dim(1) == x.dim(2) && wv.dim(1) == x.dim(2),
          "attention_forward: weight rows must match feature size");
  require(wq.dim(2) == wk.dim(2), "attention_forward: query/key widths differ");
  require(dk > 0.0, "attention_forward: dk must be positive");

  const DenseTensor q = matmul(x, wq);
  const DenseTensor k = matmul(x, wk);
  const DenseTensor v = matmul(x, wv);
  DenseTensor scores = matmul(q, transpose(k));
  const double inv_scale = 1.0 / std::sqrt(dk);
  for (index_t i = 0; i < scores.size(); ++i) scores[i] *= inv_scale;
  const DenseTensor s = apply_activation(ActivationKind::softmax_last_mode, scores);
  return matmul(s, v);
}

DenseTensor rnn_unrolled(const DenseTensor& x, const DenseTensor& wr, const DenseTensor& wx) {
  require(x.order() == 2, "rnn_unrolled: input must be order-2 (time x features)");
  require(wr.order() == 2 && wr.dim(1) == wr.dim(2), "rnn_unrolled: Wr must be square");
  require(wx.order() == 2 && wx.dim(1) == wr.dim(1) && wx.dim(2) == x.dim(2),
          "rnn_unrolled: Wx shape mismatch");
  const index_t steps = x.dim(1);
  const index_t in = x.dim(2);
  const index_t hidden = wr.dim(1);
  DenseTensor y(Shape{steps, hidden});
  std::vector<double> state(static_cast<std::size_t>(hidden), 0.0);
  std::vector<double> next(static_cast<std::size_t>(hidden), 0.0);
  for (index_t t = 0; t < steps; ++t) {
    for (index_t k = 0; k < hidden; ++k) {
      double acc = 0.0;
      for (index_t l = 0; l < hidden; ++l)
        acc += wr[k * hidden + l] * state[static_cast<std::size_t>(l)];
      for (index_t j = 0; j < in; ++j) acc += wx[k * in + j] * x[t * in + j];
      next[static_cast<std::size_t>(k)] = acc;
    }
    state = next;
    for (index_t k = 0; k < hidden; ++k) y[t * hidden + k] = state[static_cast<std::size_t>(k)];
  }
  return y;
}

DenseTensor rnn_closed_form(const DenseTensor& x, const DenseTensor& w1,
                            const DenseTensor& wx, double decay) {
  require(x.order() == 2, "rnn_closed_form: input must be order-2 (time x features)");
  require(w1.order() == 2 && w1.dim(1) == w1.dim(2), "rnn_closed_form: W1 must be square");
  require(wx.order() == 2 && wx.dim(1) == w1.dim(1) && wx.dim(2) == x.dim(2),
          "rnn_closed_form: Wx shape mismatch");
  require(decay > 0.0 && decay <= 1.0, "rnn_closed_form: decay must lie in (0, 1]");
  const double defect = max_abs_diff(matmul(w1, w1), w1);
  require(defect < 1e-10, "rnn_closed_form: W1 is not idempotent (|W1*W1 - W1|_inf = " +
                              std::to_string(defect) + ")");

  const DenseTensor pre = matmul(x, transpose(wx));  // time-major I1 x K1
  GTNLayerSpec layer;
  layer.domain_gsos.push_back(gso_time_decay(x.dim(1), decay));
  layer.feature_weights.push_back(w1);
  const DenseTensor shifted =
      gtn_forward(pre, DataTensorMeta{1, 1}, layer);
  return add(shifted, pre);
}

DenseTensor tt_dense_layer(const DenseTensor& x, const TTOperator& op,
                           const std::optional<DenseTensor>& bias,
                           ActivationKind activation) {
  DenseTensor out = tt_apply(op, x);
  if (bias) {
    require(bias->size() == out.size(), "tt_dense_layer: bias size mismatch");
    const DenseTensor b = bias->shape() == out.shape() ? *bias : reshape(*bias, out.shape());
    out = add(out, b);
  }
  return apply_activation(activation, out);
}

}  // namespace gtn
