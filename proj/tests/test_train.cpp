#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gtn/graphs.hpp"
#include "gtn/harness.hpp"
#include "gtn/model.hpp"
#include "gtn/rng.hpp"
#include "gtn/train.hpp"

using namespace gtn;

namespace {

DenseTensor random_tensor(Rng& rng, const Shape& shape, double lo = -1.0, double hi = 1.0) {
  DenseTensor t(shape);
  for (index_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

}  // namespace

TEST_CASE("loss values and gradients") {
  SUBCASE("zero residual") {
    const DenseTensor y(Shape{3}, {1.0, 2.0, 3.0});
    const LossResult l = loss(LossKind::mse, y, y);
    CHECK(l.value == 0.0);
    CHECK(max_abs(l.grad) == 0.0);
  }
  SUBCASE("hand-evaluated mse") {
    const DenseTensor y(Shape{2}, {1.0, 2.0});
    const DenseTensor t(Shape{2}, {0.0, 0.0});
    const LossResult l = loss(LossKind::mse, y, t);
    CHECK(l.value == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(l.grad[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(l.grad[1] == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("cross entropy at even odds") {
    const DenseTensor y(Shape{1}, {0.5});
    const DenseTensor t(Shape{1}, {1.0});
    const LossResult l = loss(LossKind::binary_cross_entropy, y, t);
    CHECK(l.value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }
  SUBCASE("shape and domain violations") {
    CHECK_THROWS_AS(loss(LossKind::mse, DenseTensor(Shape{2}), DenseTensor(Shape{3})),
                    std::invalid_argument);
    CHECK_THROWS_AS(loss(LossKind::binary_cross_entropy, DenseTensor(Shape{1}, {1.0}),
                         DenseTensor(Shape{1}, {1.0})),
                    std::invalid_argument);
  }
}

TEST_CASE("optimizer step behaviour") {
  const std::vector<DenseTensor> params{DenseTensor(Shape{1}, {0.0})};
  const AdamState state = AdamState::zeros_like(params);
  AdamConfig config;
  config.learning_rate = 0.1;

  SUBCASE("zero gradient leaves parameters unchanged") {
    const AdamStep out =
        optimizer_step(config, state, params, {DenseTensor(Shape{1}, {0.0})});
    CHECK(out.params[0][0] == 0.0);
    CHECK(out.state.step == 1);
  }
  SUBCASE("unit gradient moves by about the learning rate") {
    const AdamStep out =
        optimizer_step(config, state, params, {DenseTensor(Shape{1}, {1.0})});
    CHECK(out.params[0][0] == doctest::Approx(-0.1).epsilon(1e-6));
  }
  SUBCASE("deterministic: equal inputs give bit-equal outputs") {
    const std::vector<DenseTensor> grads{DenseTensor(Shape{1}, {0.37})};
    const AdamStep a = optimizer_step(config, state, params, grads);
    const AdamStep b = optimizer_step(config, state, params, grads);
    CHECK(a.params[0].values() == b.params[0].values());
    CHECK(a.state.first_moment[0].values() == b.state.first_moment[0].values());
  }
  SUBCASE("non-finite gradients are rejected") {
    CHECK_THROWS_AS(
        optimizer_step(config, state, params,
                       {DenseTensor(Shape{1}, {std::numeric_limits<double>::quiet_NaN()})}),
        std::domain_error);
  }
}

TEST_CASE("dense layer gradient matches the closed form") {
  Rng rng(101);
  Model model;
  auto& dense = dynamic_cast<DenseLayer&>(model.add(std::make_unique<DenseLayer>(3, 4, false)));
  model.initialize(rng);
  const DenseTensor x = random_tensor(rng, Shape{4});
  const DenseTensor t = random_tensor(rng, Shape{3});

  std::vector<LayerCache> caches;
  const DenseTensor y = model.forward(x, &caches);
  const LossResult l = loss(LossKind::mse, y, t);
  const Model::Backprop bp = model.backward(caches, l.grad);

  // d loss / d W = outer(dLdy, x)
  for (index_t i = 0; i < 3; ++i)
    for (index_t j = 0; j < 4; ++j)
      CHECK(bp.gradients[0].at({i, j}) ==
            doctest::Approx(l.grad[i] * x[j]).epsilon(1e-10));
  (void)dense;
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
  Rng rng(102);
  Model model;
  model.add(std::make_unique<DenseLayer>(3, 4, true));
  model.add(std::make_unique<ActivationLayer>(ActivationKind::tanh));
  model.initialize(rng);
  std::vector<LayerCache> caches;
  model.forward(random_tensor(rng, Shape{4}), &caches);
  const Model::Backprop bp = model.backward(caches, DenseTensor(Shape{3}));
  for (const auto& g : bp.gradients) CHECK(max_abs(g) == 0.0);
}

TEST_CASE("finite differences validate every layer type") {
  Rng rng(103);
  const double tol = 1e-5;

  SUBCASE("dense with bias and tanh") {
    Model model;
    model.add(std::make_unique<DenseLayer>(3, 4, true));
    model.add(std::make_unique<ActivationLayer>(ActivationKind::tanh));
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{4}),
                                 random_tensor(rng, Shape{3}), LossKind::mse);
    INFO("worst: ", report.worst_parameter, " err ", report.max_rel_error);
    CHECK(report.pass);
  }
  SUBCASE("sigmoid head with cross entropy") {
    Model model;
    model.add(std::make_unique<DenseLayer>(1, 4, true));
    model.add(std::make_unique<ActivationLayer>(ActivationKind::sigmoid));
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{4}),
                                 DenseTensor(Shape{1}, {1.0}),
                                 LossKind::binary_cross_entropy);
    CHECK(report.pass);
  }
  SUBCASE("softmax activation") {
    Model model;
    model.add(std::make_unique<DenseLayer>(4, 3, true));
    model.add(std::make_unique<ActivationLayer>(ActivationKind::softmax_last_mode));
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{3}),
                                 random_tensor(rng, Shape{4}, 0.0, 1.0), LossKind::mse);
    CHECK(report.pass);
  }
  SUBCASE("relu away from the kink") {
    Model model;
    model.add(std::make_unique<DenseLayer>(3, 3, true));
    model.add(std::make_unique<ActivationLayer>(ActivationKind::relu));
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{3}, 0.5, 1.0),
                                 random_tensor(rng, Shape{3}), LossKind::mse, 1e-6, tol);
    CHECK(report.pass);
  }
  SUBCASE("graph tensor layer with bias") {
    Model model;
    std::vector<GraphShiftOperator> gsos{gso_time_decay(3, 0.8),
                                         gso_gcn(DenseTensor::matrix({{0, 1}, {1, 0}}))};
    model.add(std::make_unique<GraphTensorLayer>(
        std::move(gsos), std::vector<std::pair<index_t, index_t>>{{3, 2}}, true));
    model.add(std::make_unique<ActivationLayer>(ActivationKind::tanh));
    model.add(std::make_unique<FlattenLayer>());
    model.add(std::make_unique<DenseLayer>(2, 18, true));
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{3, 2, 2}),
                                 random_tensor(rng, Shape{2}), LossKind::mse);
    INFO("worst: ", report.worst_parameter, " err ", report.max_rel_error);
    CHECK(report.pass);
  }
  SUBCASE("tt dense layer") {
    Model model;
    model.add(std::make_unique<TTDenseLayer>(TensorizationPlan({2, 2, 2}, {3, 2, 2}),
                                             std::vector<index_t>{2, 2}, true));
    model.add(std::make_unique<ActivationLayer>(ActivationKind::tanh));
    model.add(std::make_unique<FlattenLayer>());
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{3, 2, 2}),
                                 random_tensor(rng, Shape{8}), LossKind::mse);
    INFO("worst: ", report.worst_parameter, " err ", report.max_rel_error);
    CHECK(report.pass);
  }
  SUBCASE("attention layer") {
    Model model;
    model.add(std::make_unique<AttentionLayer>(3, 2));
    model.add(std::make_unique<FlattenLayer>());
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{4, 3}),
                                 random_tensor(rng, Shape{8}), LossKind::mse);
    INFO("worst: ", report.worst_parameter, " err ", report.max_rel_error);
    CHECK(report.pass);
  }
  SUBCASE("circulant layer") {
    Model model;
    model.add(std::make_unique<CirculantLayer>(6, 3));
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{6}),
                                 random_tensor(rng, Shape{6}), LossKind::mse);
    CHECK(report.pass);
  }
  SUBCASE("recurrent layer") {
    Model model;
    model.add(std::make_unique<RecurrentLayer>(3, 2, true));
    model.add(std::make_unique<ActivationLayer>(ActivationKind::tanh));
    model.add(std::make_unique<FlattenLayer>());
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{4, 2}),
                                 random_tensor(rng, Shape{12}), LossKind::mse);
    INFO("worst: ", report.worst_parameter, " err ", report.max_rel_error);
    CHECK(report.pass);
  }
  SUBCASE("matricize adapter") {
    Model model;
    model.add(std::make_unique<MatricizeLayer>(2));  // (2,3,2) -> 3 x 4
    model.add(std::make_unique<RecurrentLayer>(2, 4, true));
    model.add(std::make_unique<FlattenLayer>());
    model.initialize(rng);
    const auto report = fd_check(model, random_tensor(rng, Shape{2, 3, 2}),
                                 random_tensor(rng, Shape{6}), LossKind::mse);
    CHECK(report.pass);
  }
}

TEST_CASE("linear model under quadratic loss is exact for central differences") {
  Rng rng(104);
  Model model;
  model.add(std::make_unique<DenseLayer>(2, 3, false));
  model.initialize(rng);
  const auto report = fd_check(model, random_tensor(rng, Shape{3}),
                               random_tensor(rng, Shape{2}), LossKind::mse, 1e-5, 1e-9);
  CHECK(report.max_rel_error < 1e-9);
}

namespace {

// scaling layer that deliberately reports a corrupted gradient
class BrokenScaleLayer final : public Layer {
 public:
  BrokenScaleLayer() : gain_{"gain", DenseTensor(Shape{1}, {1.0})} {}
  std::string kind() const override { return "broken_scale"; }
  DenseTensor forward(const DenseTensor& x, LayerCache* cache) const override {
    if (cache) cache->input = x;
    return scale(x, gain_.value[0]);
  }
  LayerGrads backward(const LayerCache& cache, const DenseTensor& dy) const override {
    LayerGrads g;
    double acc = 0.0;
    for (index_t i = 0; i < dy.size(); ++i) acc += dy[i] * cache.input[i];
    g.dparams.push_back(DenseTensor(Shape{1}, {acc + 0.1}));  // corrupted on purpose
    g.dx = scale(dy, gain_.value[0]);
    return g;
  }
  std::vector<Parameter*> parameters() override { return {&gain_}; }

 private:
  Parameter gain_;
};

}  // namespace

TEST_CASE("a corrupted gradient fails the finite-difference check") {
  Rng rng(105);
  Model model;
  model.add(std::make_unique<BrokenScaleLayer>());
  model.initialize(rng);
  const auto report = fd_check(model, random_tensor(rng, Shape{3}),
                               random_tensor(rng, Shape{3}), LossKind::mse);
  CHECK_FALSE(report.pass);
}

TEST_CASE("fd_check on the full desk-scale multi-graph pipeline") {
  ExperimentConfig config;  // defaults: I1=6, I2=8, J1=4, tt ranks 2
  Rng graph_rng(3);
  DenseTensor ring(Shape{config.nodes, config.nodes});
  for (index_t i = 0; i < config.nodes; ++i) {
    const index_t j = (i + 1) % config.nodes;
    ring[i * config.nodes + j] = 1.0;
    ring[j * config.nodes + i] = 1.0;
  }
  Model model = build_model(config, ring);
  Rng rng(106);
  model.initialize(rng);
  Rng data_rng(107);
  const DenseTensor x =
      random_tensor(data_rng, Shape{config.time_steps, config.nodes, config.features});
  const DenseTensor t = random_tensor(data_rng, Shape{1});
  const auto report = fd_check(model, x, t, LossKind::mse, 1e-5, 1e-5);
  INFO("worst: ", report.worst_parameter, " err ", report.max_rel_error);
  CHECK(report.pass);
  CHECK(report.parameters_checked == count_params(model));
}

TEST_CASE("batch gradients average per-sample gradients in a fixed order") {
  Rng rng(108);
  Model model;
  model.add(std::make_unique<DenseLayer>(2, 3, false));
  model.initialize(rng);
  std::vector<Sample> batch;
  for (int i = 0; i < 3; ++i)
    batch.push_back(Sample{random_tensor(rng, Shape{3}), random_tensor(rng, Shape{2})});

  std::vector<DenseTensor> grads;
  const double mean_loss = batch_gradients(model, batch, LossKind::mse, &grads);

  double expected_loss = 0.0;
  DenseTensor expected(Shape{2, 3});
  for (const auto& s : batch) {
    std::vector<LayerCache> caches;
    const DenseTensor y = model.forward(s.input, &caches);
    const LossResult l = loss(LossKind::mse, y, s.target);
    expected_loss += l.value;
    expected = add(expected, model.backward(caches, l.grad).gradients[0]);
  }
  expected_loss /= 3.0;
  expected = scale(expected, 1.0 / 3.0);
  CHECK(mean_loss == doctest::Approx(expected_loss).epsilon(1e-15));
  CHECK(max_abs_diff(grads[0], expected) == 0.0);
}

TEST_CASE("a linear graph tensor student fits its teacher to below 1e-6") {
  // single trainable weight, fixed shared operators: the objective is convex
  Rng rng(109);
  const DenseTensor adjacency = DenseTensor::matrix(
      {{0, 1, 0, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}});
  const auto make_linear_model = [&]() {
    Model m;
    std::vector<GraphShiftOperator> gsos{gso_time_decay(3, 0.9), gso_gcn(adjacency)};
    m.add(std::make_unique<GraphTensorLayer>(
        std::move(gsos), std::vector<std::pair<index_t, index_t>>{{2, 2}}, false));
    m.add(std::make_unique<FlattenLayer>());
    return m;
  };

  Model teacher = make_linear_model();
  Rng teacher_rng(7);
  teacher.initialize(teacher_rng);
  std::vector<Sample> data;
  for (int s = 0; s < 32; ++s) {
    DenseTensor x = random_tensor(rng, Shape{3, 4, 2});
    DenseTensor y = teacher.forward(x);
    data.push_back(Sample{std::move(x), std::move(y)});
  }

  Model student = make_linear_model();
  Rng student_rng(8);
  student.initialize(student_rng);
  FitConfig fit_config;
  fit_config.steps = 2000;
  fit_config.adam.learning_rate = 1e-2;
  const FitResult result = fit(student, data, LossKind::mse, fit_config);
  CHECK(result.loss_curve.back() < 1e-6);
}

TEST_CASE("fit is deterministic") {
  Rng rng(110);
  std::vector<Sample> data;
  for (int s = 0; s < 8; ++s)
    data.push_back(Sample{random_tensor(rng, Shape{3}), random_tensor(rng, Shape{2})});
  const auto run = [&](std::uint64_t seed) {
    Model m;
    m.add(std::make_unique<DenseLayer>(2, 3, true));
    Rng init(seed);
    m.initialize(init);
    FitConfig fc;
    fc.steps = 60;
    fc.batch_size = 4;
    fc.shuffle_seed = 99;
    return fit(m, data, LossKind::mse, fc).loss_curve;
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}
