#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gtn/graphs.hpp"
#include "gtn/tensor.hpp"
#include "gtn/tt.hpp"

// The graph tensor network forward pass: a Tucker product over all domain and
// feature modes of a data tensor, one graph shift operator per domain mode and
// one weight matrix per feature mode, followed by an optional bias and an
// activation. The classical dense / graph-convolutional / convolutional /
// attention / recurrent forward passes below are independent reference
// implementations used to cross-check their reductions onto this layer.

namespace gtn {

enum class ActivationKind { identity, relu, tanh, sigmoid, softmax_last_mode };

std::string to_string(ActivationKind kind);
ActivationKind activation_from_string(const std::string& name);

/// Elementwise activations; softmax_last_mode normalizes over the final mode.
DenseTensor apply_activation(ActivationKind kind, const DenseTensor& x);

/// Splits a data tensor's modes into N leading domain modes and M trailing
/// feature modes.
struct DataTensorMeta {
  index_t domain_modes = 0;   // N
  index_t feature_modes = 0;  // M

  index_t order() const { return domain_modes + feature_modes; }
};

struct GTNLayerSpec {
  std::vector<GraphShiftOperator> domain_gsos;  // one per domain mode
  std::vector<DenseTensor> feature_weights;     // K_m x J_m, one per feature mode
  std::optional<DenseTensor> bias;              // matches the output shape
  ActivationKind activation = ActivationKind::identity;
};

/// activation( [[X; S_1..S_N, W_1..W_M]] + bias )
DenseTensor gtn_forward(const DenseTensor& x, const DataTensorMeta& meta,
                        const GTNLayerSpec& layer);

/// y = W x
DenseTensor dnn_forward(const DenseTensor& x, const DenseTensor& w);

/// Y = S X W with S the normalized adjacency of A; W is J_1 x K_1.
DenseTensor gcn_forward(const DenseTensor& x, const DenseTensor& adjacency,
                        const DenseTensor& w);

/// Circular convolution of x with the kernel, evaluated by a direct loop.
DenseTensor cnn_forward(const DenseTensor& x, const DenseTensor& kernel);

/// Scaled dot-product attention, evaluated directly; weights are J_1 x K_1.
DenseTensor attention_forward(const DenseTensor& x, const DenseTensor& wq,
                              const DenseTensor& wk, const DenseTensor& wv, double dk);

/// Hidden states y_i = Wr y_{i-1} + Wx x_i with y_0 = 0, stacked as rows.
DenseTensor rnn_unrolled(const DenseTensor& x, const DenseTensor& wr, const DenseTensor& wx);

/// Closed-form recurrence for a scaled idempotent recurrent weight Wr = c W1:
/// Y = [[Xt; S, W1]] + Xt with S the time-decay operator and Xt = X Wx^T.
/// Rejects W1 that is not idempotent (|W1 W1 - W1|_inf >= 1e-10).
DenseTensor rnn_closed_form(const DenseTensor& x, const DenseTensor& w1,
                            const DenseTensor& wx, double decay);

/// activation(tt_apply(op, x) + bias)
DenseTensor tt_dense_layer(const DenseTensor& x, const TTOperator& op,
                           const std::optional<DenseTensor>& bias,
                           ActivationKind activation);

}  // namespace gtn
