#include "gtn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gtn/rng.hpp"

namespace gtn {

using detail::require;

LossKind loss_from_string(const std::string& name) {
  if (name == "mse") return LossKind::mse;
  if (name == "binary_cross_entropy" || name == "bce") return LossKind::binary_cross_entropy;
  throw std::invalid_argument("unknown loss: " + name);
}

std::string to_string(LossKind kind) {
  return kind == LossKind::mse ? "mse" : "binary_cross_entropy";
}

LossResult loss(LossKind kind, const DenseTensor& prediction, const DenseTensor& target) {
  require(prediction.same_shape(target), "loss: prediction/target shape mismatch");
  const index_t count = prediction.size();
  LossResult result;
  result.grad = DenseTensor(prediction.shape());
  const double inv = 1.0 / static_cast<double>(count);
  if (kind == LossKind::mse) {
    double acc = 0.0;
    for (index_t i = 0; i < count; ++i) {
      const double r = prediction[i] - target[i];
      acc += r * r;
      result.grad[i] = 2.0 * r * inv;
    }
    result.value = acc * inv;
  } else {
    double acc = 0.0;
    for (index_t i = 0; i < count; ++i) {
      const double y = prediction[i];
      const double t = target[i];
      require(y > 0.0 && y < 1.0,
              "loss: binary cross entropy needs predictions strictly inside (0, 1)");
      acc -= t * std::log(y) + (1.0 - t) * std::log(1.0 - y);
      result.grad[i] = (-t / y + (1.0 - t) / (1.0 - y)) * inv;
    }
    result.value = acc * inv;
  }
  return result;
}

AdamState AdamState::zeros_like(const std::vector<DenseTensor>& params) {
  AdamState state;
  state.first_moment.reserve(params.size());
  state.second_moment.reserve(params.size());
  for (const auto& p : params) {
    state.first_moment.emplace_back(p.shape());
    state.second_moment.emplace_back(p.shape());
  }
  return state;
}

AdamStep optimizer_step(const AdamConfig& config, const AdamState& state,
                        const std::vector<DenseTensor>& params,
                        const std::vector<DenseTensor>& grads) {
  require(params.size() == grads.size(), "optimizer_step: params/grads count mismatch");
  require(state.first_moment.size() == params.size() &&
              state.second_moment.size() == params.size(),
          "optimizer_step: state does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i].same_shape(grads[i]), "optimizer_step: gradient shape mismatch");
    if (!all_finite(grads[i])) {
      throw std::domain_error("optimizer_step: non-finite gradient, step rejected");
    }
  }

  AdamStep out{params, state};
  out.state.step = state.step + 1;
  const double t = static_cast<double>(out.state.step);
  const double bias1 = 1.0 - std::pow(config.beta1, t);
  const double bias2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    DenseTensor& p = out.params[i];
    DenseTensor& m = out.state.first_moment[i];
    DenseTensor& v = out.state.second_moment[i];
    const DenseTensor& g = grads[i];
    for (index_t k = 0; k < p.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
      const double m_hat = m[k] / bias1;
      const double v_hat = v[k] / bias2;
      p[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
  return out;
}

double batch_gradients(Model& model, std::span<const Sample> batch, LossKind loss_kind,
                       std::vector<DenseTensor>* grads_out) {
  require(!batch.empty(), "batch_gradients: batch must not be empty");
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  std::vector<LayerCache> caches;
  for (const Sample& sample : batch) {
    const DenseTensor prediction = model.forward(sample.input, grads_out ? &caches : nullptr);
    LossResult l = loss(loss_kind, prediction, sample.target);
    total += l.value;
    if (grads_out) {
      Model::Backprop bp = model.backward(caches, l.grad);
      if (grads_out->empty()) {
        *grads_out = std::move(bp.gradients);
      } else {
        for (std::size_t i = 0; i < grads_out->size(); ++i)
          (*grads_out)[i] = add((*grads_out)[i], bp.gradients[i]);
      }
    }
  }
  if (grads_out) {
    for (auto& g : *grads_out) g = scale(g, inv);
  }
  return total * inv;
}

FdCheckReport fd_check(Model& model, const DenseTensor& input, const DenseTensor& target,
                       LossKind loss_kind, double h, double tolerance) {
  require(h > 0.0, "fd_check: step size must be positive");
  FdCheckReport report;
  report.step = h;
  report.tolerance = tolerance;

  std::vector<LayerCache> caches;
  const DenseTensor prediction = model.forward(input, &caches);
  const LossResult l = loss(loss_kind, prediction, target);
  const Model::Backprop bp = model.backward(caches, l.grad);

  std::vector<Parameter*> params = model.parameters();
  require(params.size() == bp.gradients.size(), "fd_check: gradient count mismatch");
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    DenseTensor& value = params[pi]->value;
    const DenseTensor& analytic = bp.gradients[pi];
    for (index_t k = 0; k < value.size(); ++k) {
      const double saved = value[k];
      value[k] = saved + h;
      const double up = loss(loss_kind, model.forward(input), target).value;
      value[k] = saved - h;
      const double down = loss(loss_kind, model.forward(input), target).value;
      value[k] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double a = analytic[k];
      const double rel = std::abs(a - fd) / std::max(1e-6, std::abs(a) + std::abs(fd));
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_parameter = params[pi]->name + "[" + std::to_string(k) + "]";
      }
      ++report.parameters_checked;
    }
  }
  report.pass = report.max_rel_error < tolerance;
  return report;
}

FitResult fit(Model& model, const std::vector<Sample>& train, LossKind loss_kind,
              const FitConfig& config) {
  require(!train.empty(), "fit: training set must not be empty");
  require(config.steps >= 1, "fit: needs at least one step");

  std::vector<Parameter*> params = model.parameters();
  std::vector<DenseTensor> values;
  values.reserve(params.size());
  for (Parameter* p : params) values.push_back(p->value);
  AdamState state = AdamState::zeros_like(values);
  AdamConfig adam = config.adam;

  Rng shuffle_rng(config.shuffle_seed);
  std::vector<index_t> order(train.size());
  std::iota(order.begin(), order.end(), index_t{0});
  const index_t batch =
      config.batch_size <= 0 ? static_cast<index_t>(train.size())
                             : std::min<index_t>(config.batch_size, train.size());
  std::size_t cursor = order.size();  // forces a shuffle before the first batch

  FitResult result;
  result.loss_curve.reserve(static_cast<std::size_t>(config.steps));
  std::vector<Sample> minibatch;
  double prev_window = 0.0;
  bool have_prev_window = false;

  for (index_t step = 0; step < config.steps; ++step) {
    minibatch.clear();
    for (index_t b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        // seeded Fisher-Yates reshuffle at each epoch boundary
        for (std::size_t i = order.size(); i > 1; --i) {
          const std::size_t j = static_cast<std::size_t>(shuffle_rng.uniform_index(i));
          std::swap(order[i - 1], order[j]);
        }
        cursor = 0;
      }
      minibatch.push_back(train[static_cast<std::size_t>(order[cursor++])]);
    }

    std::vector<DenseTensor> grads;
    const double batch_loss = batch_gradients(model, minibatch, loss_kind, &grads);
    if (!std::isfinite(batch_loss)) {
      throw std::runtime_error("fit: non-finite loss at step " + std::to_string(step));
    }
    result.loss_curve.push_back(batch_loss);

    AdamStep update = optimizer_step(adam, state, values, grads);
    values = std::move(update.params);
    state = std::move(update.state);
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];

    if (config.plateau_window > 0 &&
        (step + 1) % config.plateau_window == 0) {
      const std::size_t w = static_cast<std::size_t>(config.plateau_window);
      double mean = 0.0;
      for (std::size_t i = result.loss_curve.size() - w; i < result.loss_curve.size(); ++i)
        mean += result.loss_curve[i];
      mean /= static_cast<double>(w);
      if (have_prev_window && mean >= prev_window) adam.learning_rate *= 0.5;
      prev_window = mean;
      have_prev_window = true;
    }
  }
  result.final_learning_rate = adam.learning_rate;
  return result;
}

}  // namespace gtn
