#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gtn/model.hpp"
#include "gtn/tensor.hpp"

// Losses, adaptive-moment optimizer, the finite-difference gradient check and
// a deterministic training loop.

namespace gtn {

enum class LossKind { mse, binary_cross_entropy };

LossKind loss_from_string(const std::string& name);
std::string to_string(LossKind kind);

struct LossResult {
  double value = 0.0;
  DenseTensor grad;  // dLoss/dY, same shape as the prediction
};

/// mse: mean of squared residuals. binary_cross_entropy: mean of
/// -[t log y + (1-t) log(1-y)], predictions must lie strictly in (0, 1).
LossResult loss(LossKind kind, const DenseTensor& prediction, const DenseTensor& target);

struct AdamConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  index_t step = 0;
  std::vector<DenseTensor> first_moment;
  std::vector<DenseTensor> second_moment;

  static AdamState zeros_like(const std::vector<DenseTensor>& params);
};

struct AdamStep {
  std::vector<DenseTensor> params;
  AdamState state;
};

/// One bias-corrected adaptive-moment update. Pure function of its inputs;
/// throws std::domain_error on a non-finite gradient (the step is rejected).
AdamStep optimizer_step(const AdamConfig& config, const AdamState& state,
                        const std::vector<DenseTensor>& params,
                        const std::vector<DenseTensor>& grads);

struct Sample {
  DenseTensor input;
  DenseTensor target;
};

/// Mean loss over the batch; accumulates per-sample parameter gradients in a
/// fixed order and divides by the batch size. `grads_out` may be null.
double batch_gradients(Model& model, std::span<const Sample> batch, LossKind loss_kind,
                       std::vector<DenseTensor>* grads_out);

struct FdCheckReport {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  index_t parameters_checked = 0;
  double step = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Central-difference check of every trainable parameter against the analytic
/// backward pass. Parameter values are restored exactly afterwards.
FdCheckReport fd_check(Model& model, const DenseTensor& input, const DenseTensor& target,
                       LossKind loss_kind, double h = 1e-5, double tolerance = 1e-5);

struct FitConfig {
  AdamConfig adam;
  index_t steps = 2000;
  index_t batch_size = 0;       // 0 runs full-batch
  index_t plateau_window = 50;  // halve the learning rate when a window stalls
  std::uint64_t shuffle_seed = 0;
};

struct FitResult {
  std::vector<double> loss_curve;  // one mean-batch loss per step
  double final_learning_rate = 0.0;
};

/// Deterministic training loop; aborts with std::runtime_error if the loss
/// turns non-finite.
FitResult fit(Model& model, const std::vector<Sample>& train, LossKind loss_kind,
              const FitConfig& config);

}  // namespace gtn
