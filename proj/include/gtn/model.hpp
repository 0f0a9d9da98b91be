#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gtn/graphs.hpp"
#include "gtn/layers.hpp"
#include "gtn/rng.hpp"
#include "gtn/tensor.hpp"
#include "gtn/tt.hpp"

// Trainable model: an ordered list of layers with a named parameter registry
// and hand-written reverse-mode gradients. Graph shift operators are fixed
// structure; only feature weights, TT cores, dense weights, attention
// projections, convolution kernels, recurrent weights and biases train.

namespace gtn {

struct Parameter {
  std::string name;
  DenseTensor value;
};

struct LayerCache {
  DenseTensor input;
  std::vector<DenseTensor> extras;
};

struct LayerGrads {
  DenseTensor dx;
  std::vector<DenseTensor> dparams;  // aligned with the layer's parameters()
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string kind() const = 0;
  virtual DenseTensor forward(const DenseTensor& x, LayerCache* cache) const = 0;
  virtual LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const = 0;
  virtual std::vector<Parameter*> parameters() { return {}; }
  virtual void initialize(Rng&) {}

  index_t parameter_count();
  /// Prepends `prefix` to every parameter name (assigned once by Model::add).
  void apply_name_prefix(const std::string& prefix);
};

/// y = W x (+ b) for an order-1 input.
class DenseLayer final : public Layer {
 public:
  DenseLayer(index_t out_dim, index_t in_dim, bool with_bias = true);
  std::string kind() const override { return "dense"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override;
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override;
  std::vector<Parameter*> parameters() override;
  void initialize(Rng& rng) override;

  const DenseTensor& weight() const { return weight_.value; }

 private:
  Parameter weight_;
  std::optional<Parameter> bias_;
};

class ActivationLayer final : public Layer {
 public:
  explicit ActivationLayer(ActivationKind activation) : activation_(activation) {}
  std::string kind() const override { return "activation"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override;
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override;

 private:
  ActivationKind activation_;
};

/// Vectorizes the incoming tensor.
class FlattenLayer final : public Layer {
 public:
  std::string kind() const override { return "flatten"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override;
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override;
};

/// Unfolds the incoming tensor along one mode (input adapter for the
/// single-domain baselines).
class MatricizeLayer final : public Layer {
 public:
  explicit MatricizeLayer(index_t mode) : mode_(mode) {}
  std::string kind() const override { return "matricize"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override;
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override;

 private:
  index_t mode_;
};

/// Tucker-product layer over a data tensor: fixed graph shift operators on the
/// domain modes, trainable weight matrices on the feature modes, optional
/// full-shape bias.
class GraphTensorLayer final : public Layer {
 public:
  GraphTensorLayer(std::vector<GraphShiftOperator> gsos,
                   std::vector<std::pair<index_t, index_t>> weight_dims,  // (K_m, J_m)
                   bool with_bias);
  std::string kind() const override { return "gtn"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override;
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override;
  std::vector<Parameter*> parameters() override;
  void initialize(Rng& rng) override;

  const std::vector<GraphShiftOperator>& gsos() const { return gsos_; }
  Shape output_shape() const;

 private:
  std::vector<GraphShiftOperator> gsos_;
  std::vector<Parameter> weights_;
  std::optional<Parameter> bias_;
};

/// Dense layer whose weight matrix lives in tensor-train form; the cores are
/// the trainable parameters and the full matrix is never materialized in the
/// forward or backward pass.
class TTDenseLayer final : public Layer {
 public:
  TTDenseLayer(const TensorizationPlan& plan, std::vector<index_t> interior_ranks,
               bool with_bias);
  explicit TTDenseLayer(TTOperator op, bool with_bias);
  std::string kind() const override { return "tt_dense"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override;
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override;
  std::vector<Parameter*> parameters() override;
  void initialize(Rng& rng) override;

  TTOperator operator_view() const;
  index_t weight_param_count() const;

 private:
  std::vector<Parameter> cores_;
  std::optional<Parameter> bias_;
};

/// Scaled dot-product self-attention with trainable query/key/value weights;
/// gradients for Wq and Wk flow through the softmax.
class AttentionLayer final : public Layer {
 public:
  AttentionLayer(index_t feature_dim, index_t head_dim);
  std::string kind() const override { return "attention"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override;
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override;
  std::vector<Parameter*> parameters() override;
  void initialize(Rng& rng) override;

 private:
  Parameter wq_, wk_, wv_;
  double dk_;
};

/// Circular convolution with a trainable kernel.
class CirculantLayer final : public Layer {
 public:
  CirculantLayer(index_t size, index_t kernel_size);
  std::string kind() const override { return "circulant"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override;
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override;
  std::vector<Parameter*> parameters() override;
  void initialize(Rng& rng) override;

 private:
  Parameter kernel_;
  index_t size_;
};

/// Linear recurrence y_t = Wr y_{t-1} + Wx x_t (+ b), all hidden states
/// returned time-major; trained with backpropagation through time.
class RecurrentLayer final : public Layer {
 public:
  RecurrentLayer(index_t hidden_dim, index_t in_dim, bool with_bias = true);
  std::string kind() const override { return "rnn"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override;
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override;
  std::vector<Parameter*> parameters() override;
  void initialize(Rng& rng) override;

 private:
  Parameter wr_, wx_;
  std::optional<Parameter> bias_;
};

class Model {
 public:
  Model() = default;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  Layer& add(std::unique_ptr<Layer> layer);
  index_t layer_count() const { return static_cast<index_t>(layers_.size()); }
  Layer& layer(index_t i) { return *layers_[static_cast<std::size_t>(i)]; }
  const Layer& layer(index_t i) const { return *layers_[static_cast<std::size_t>(i)]; }

  DenseTensor forward(const DenseTensor& x, std::vector<LayerCache>* caches = nullptr) const;

  struct Backprop {
    DenseTensor dx;
    std::vector<DenseTensor> gradients;  // aligned with parameters()
  };
  /// Reverse pass through the cached forward; dLdY is the loss gradient at the output.
  Backprop backward(const std::vector<LayerCache>& caches, const DenseTensor& dLdY) const;

  std::vector<Parameter*> parameters();
  index_t trainable_param_count() const;
  void initialize(Rng& rng);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

namespace init {
/// Uniform in +/- sqrt(6 / (fan_in + fan_out)).
void glorot(Rng& rng, DenseTensor& w, index_t fan_in, index_t fan_out);
}  // namespace init

}  // namespace gtn
