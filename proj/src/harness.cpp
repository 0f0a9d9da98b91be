#include "gtn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gtn/graphs.hpp"
#include "gtn/rng.hpp"

namespace gtn {

using detail::require;
using nlohmann::json;

namespace {

// seed stream salts
constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kInputStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kSplitStream = 4;
constexpr std::uint64_t kInitStream = 5;
constexpr std::uint64_t kShuffleStream = 6;
constexpr std::uint64_t kCalibrationStream = 7;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known)
      throw std::invalid_argument("config: unknown key \"" + item.key() + "\" in " + where);
  }
}

std::vector<index_t> to_dims(const json& j, const std::string& where) {
  require(j.is_array() && !j.empty(), "config: " + where + " must be a non-empty array");
  std::vector<index_t> out;
  for (const auto& v : j) {
    require(v.is_number_integer() && v.get<index_t>() >= 1,
            "config: " + where + " entries must be positive integers");
    out.push_back(v.get<index_t>());
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  require(c.task == "regression" || c.task == "classification",
          "config: task must be regression or classification");
  require(c.family == "gtn" || c.family == "rnn_baseline" || c.family == "gcn_baseline",
          "config: unknown model family " + c.family);
  require(c.time_steps >= 1 && c.nodes >= 1 && c.features >= 1,
          "config: mode sizes must be >= 1");
  require(c.model.feature_hidden >= 1 && c.model.output_dim >= 1,
          "config: model sizes must be >= 1");
  const std::size_t n = c.model.tt_out_factors.size();
  require(n >= 1 && n <= 3, "config: tt_out_factors must have 1 to 3 entries");
  require(c.model.tt_ranks.size() == n - 1,
          "config: tt_ranks must have one entry per interior bond");
  for (index_t r : c.model.tt_ranks) require(r >= 1, "config: tt_ranks must be >= 1");
  require(c.model.time_decay > 0.0 && c.model.time_decay <= 1.0,
          "config: time_decay must lie in (0, 1]");
  activation_from_string(c.model.activation1);
  activation_from_string(c.model.activation2);
  require(c.training.learning_rate > 0.0, "config: learning_rate must be positive");
  require(c.training.steps >= 1, "config: steps must be >= 1");
  require(c.training.train_fraction > 0.0 && c.training.train_fraction < 1.0,
          "config: train_fraction must lie in (0, 1)");
  if (!c.use_csv) {
    const auto& s = c.synthetic;
    require(s.graph_family == "ring" || s.graph_family == "geometric" ||
                s.graph_family == "community",
            "config: unknown graph_family " + s.graph_family);
    require(s.n_samples >= 4, "config: n_samples must be >= 4");
    require(s.noise >= 0.0, "config: noise must be >= 0");
  }
  if (c.task == "classification")
    require(c.model.output_dim == 1, "config: classification uses output_dim 1");
}

// Groups the TT input dims (I1, I2, K1) into `n` contiguous column factors.
std::vector<index_t> group_input_dims(const ExperimentConfig& c, std::size_t n) {
  const std::vector<index_t> dims{c.time_steps, c.nodes, c.model.feature_hidden};
  std::vector<index_t> out;
  if (n == 3) {
    out = dims;
  } else if (n == 2) {
    out = {dims[0], dims[1] * dims[2]};
  } else {
    out = {dims[0] * dims[1] * dims[2]};
  }
  return out;
}

}  // namespace

index_t ModelHyper::hidden_dim() const {
  index_t p = 1;
  for (index_t d : tt_out_factors) p *= d;
  return p;
}

// -- Config -----------------------------------------------------------------------

namespace {
ExperimentConfig parse_config_object(const json& j);
}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    return parse_config_object(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
}

namespace {
ExperimentConfig parse_config_object(const json& j) {
  require(j.is_object(), "config: top level must be an object");
  check_keys(j, {"task", "family", "modes", "data", "model", "training", "seed"}, "top level");

  ExperimentConfig c;
  if (j.contains("task")) c.task = j["task"].get<std::string>();
  if (j.contains("family")) c.family = j["family"].get<std::string>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("modes")) {
    const json& m = j["modes"];
    check_keys(m, {"time_steps", "nodes", "features"}, "modes");
    if (m.contains("time_steps")) c.time_steps = m["time_steps"].get<index_t>();
    if (m.contains("nodes")) c.nodes = m["nodes"].get<index_t>();
    if (m.contains("features")) c.features = m["features"].get<index_t>();
  }

  if (j.contains("data")) {
    const json& d = j["data"];
    check_keys(d, {"synthetic", "csv"}, "data");
    require(!(d.contains("synthetic") && d.contains("csv")),
            "config: data must be synthetic or csv, not both");
    if (d.contains("csv")) {
      const json& v = d["csv"];
      check_keys(v, {"inputs", "targets", "adjacency"}, "data.csv");
      require(v.contains("inputs") && v.contains("targets") && v.contains("adjacency"),
              "config: data.csv needs inputs, targets and adjacency paths");
      c.use_csv = true;
      c.csv.inputs_path = v["inputs"].get<std::string>();
      c.csv.targets_path = v["targets"].get<std::string>();
      c.csv.adjacency_path = v["adjacency"].get<std::string>();
    } else if (d.contains("synthetic")) {
      const json& v = d["synthetic"];
      check_keys(v, {"graph_family", "n_samples", "teacher_seed", "noise"}, "data.synthetic");
      if (v.contains("graph_family")) c.synthetic.graph_family = v["graph_family"].get<std::string>();
      if (v.contains("n_samples")) c.synthetic.n_samples = v["n_samples"].get<index_t>();
      if (v.contains("teacher_seed")) c.synthetic.teacher_seed = v["teacher_seed"].get<std::uint64_t>();
      if (v.contains("noise")) c.synthetic.noise = v["noise"].get<double>();
    }
  }

  if (j.contains("model")) {
    const json& m = j["model"];
    check_keys(m,
               {"feature_hidden", "tt_out_factors", "tt_ranks", "output_dim", "activation1",
                "activation2", "time_decay", "gtn_bias"},
               "model");
    if (m.contains("feature_hidden")) c.model.feature_hidden = m["feature_hidden"].get<index_t>();
    if (m.contains("tt_out_factors"))
      c.model.tt_out_factors = to_dims(m["tt_out_factors"], "model.tt_out_factors");
    if (m.contains("tt_ranks")) {
      c.model.tt_ranks.clear();
      for (const auto& v : m["tt_ranks"]) c.model.tt_ranks.push_back(v.get<index_t>());
    }
    if (m.contains("output_dim")) c.model.output_dim = m["output_dim"].get<index_t>();
    if (m.contains("activation1")) c.model.activation1 = m["activation1"].get<std::string>();
    if (m.contains("activation2")) c.model.activation2 = m["activation2"].get<std::string>();
    if (m.contains("time_decay")) c.model.time_decay = m["time_decay"].get<double>();
    if (m.contains("gtn_bias")) c.model.gtn_bias = m["gtn_bias"].get<bool>();
  }

  if (j.contains("training")) {
    const json& t = j["training"];
    check_keys(t, {"learning_rate", "steps", "batch_size", "train_fraction"}, "training");
    if (t.contains("learning_rate")) c.training.learning_rate = t["learning_rate"].get<double>();
    if (t.contains("steps")) c.training.steps = t["steps"].get<index_t>();
    if (t.contains("batch_size")) c.training.batch_size = t["batch_size"].get<index_t>();
    if (t.contains("train_fraction")) c.training.train_fraction = t["train_fraction"].get<double>();
  }

  validate(c);
  return c;
}
}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["task"] = c.task;
  j["family"] = c.family;
  j["modes"] = {{"time_steps", c.time_steps}, {"nodes", c.nodes}, {"features", c.features}};
  if (c.use_csv) {
    j["data"] = {{"csv",
                  {{"inputs", c.csv.inputs_path},
                   {"targets", c.csv.targets_path},
                   {"adjacency", c.csv.adjacency_path}}}};
  } else {
    j["data"] = {{"synthetic",
                  {{"graph_family", c.synthetic.graph_family},
                   {"n_samples", c.synthetic.n_samples},
                   {"teacher_seed", c.synthetic.teacher_seed},
                   {"noise", c.synthetic.noise}}}};
  }
  j["model"] = {{"feature_hidden", c.model.feature_hidden},
                {"tt_out_factors", c.model.tt_out_factors},
                {"tt_ranks", c.model.tt_ranks},
                {"output_dim", c.model.output_dim},
                {"activation1", c.model.activation1},
                {"activation2", c.model.activation2},
                {"time_decay", c.model.time_decay},
                {"gtn_bias", c.model.gtn_bias}};
  j["training"] = {{"learning_rate", c.training.learning_rate},
                   {"steps", c.training.steps},
                   {"batch_size", c.training.batch_size},
                   {"train_fraction", c.training.train_fraction}};
  j["seed"] = c.seed;
  return j.dump(2);
}

// -- Synthetic data -------------------------------------------------------------------

namespace {

DenseTensor make_adjacency(const ExperimentConfig& c, Rng& rng) {
  const index_t n = c.nodes;
  DenseTensor a(Shape{n, n});
  const auto connect = [&](index_t i, index_t j) {
    if (i == j) return;
    a[i * n + j] = 1.0;
    a[j * n + i] = 1.0;
  };
  if (c.synthetic.graph_family == "ring") {
    for (index_t i = 0; i < n; ++i) connect(i, (i + 1) % n);
  } else if (c.synthetic.graph_family == "geometric") {
    std::vector<std::pair<double, double>> points;
    points.reserve(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) points.emplace_back(rng.uniform(), rng.uniform());
    const double radius = 1.5 / std::sqrt(static_cast<double>(n));
    for (index_t i = 0; i < n; ++i) {
      for (index_t j = i + 1; j < n; ++j) {
        const double dx = points[static_cast<std::size_t>(i)].first -
                          points[static_cast<std::size_t>(j)].first;
        const double dy = points[static_cast<std::size_t>(i)].second -
                          points[static_cast<std::size_t>(j)].second;
        if (std::sqrt(dx * dx + dy * dy) < radius) connect(i, j);
      }
    }
  } else {  // community: two blocks, dense inside, sparse across
    const index_t half = n / 2;
    for (index_t i = 0; i < n; ++i) {
      for (index_t j = i + 1; j < n; ++j) {
        const bool same = (i < half) == (j < half);
        const double p = same ? 0.8 : 0.15;
        if (rng.uniform() < p) connect(i, j);
      }
    }
  }
  return a;
}

}  // namespace

SyntheticData synth_generate(const ExperimentConfig& config) {
  require(!config.use_csv, "synth_generate: config selects csv data");
  const Rng root(config.seed);
  Rng graph_rng = root.fork(kGraphStream);
  Rng input_rng = root.fork(kInputStream);
  Rng noise_rng = root.fork(kNoiseStream);
  Rng split_rng = root.fork(kSplitStream);

  SyntheticData data;
  data.adjacency = make_adjacency(config, graph_rng);
  data.time_gso = gso_time_decay(config.time_steps, config.model.time_decay);
  data.task_gso = gso_gcn(data.adjacency);

  // Hidden teacher: always the multi-graph family, seeded independently of
  // the student initialization.
  ExperimentConfig teacher_config = config;
  teacher_config.family = "gtn";
  Model teacher = build_model(teacher_config, data.adjacency);
  Rng teacher_rng(config.synthetic.teacher_seed);
  teacher.initialize(teacher_rng);

  const index_t n = config.synthetic.n_samples;
  const auto draw_input = [&](Rng& rng) {
    DenseTensor x(Shape{config.time_steps, config.nodes, config.features});
    for (index_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
    return x;
  };

  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(n));
  if (config.task == "classification") {
    // Labels are the sign of the teacher output around its typical level.
    // A calibration pass estimates that level and the output spread, and
    // draws inside the ambiguity band are rejected so the classes stay
    // separable with a margin.
    Rng calib_rng = root.fork(kCalibrationStream);
    std::vector<double> calib;
    for (int s = 0; s < 256; ++s) calib.push_back(teacher.forward(draw_input(calib_rng))[0]);
    std::sort(calib.begin(), calib.end());
    const double center = calib[calib.size() / 2];
    std::vector<double> deviations;
    for (double z : calib) deviations.push_back(std::abs(z - center));
    std::sort(deviations.begin(), deviations.end());
    const double spread = deviations[deviations.size() / 2];
    const double margin = 0.5 * spread;
    while (static_cast<index_t>(samples.size()) < n) {
      DenseTensor x = draw_input(input_rng);
      double z = teacher.forward(x)[0];
      if (config.synthetic.noise > 0.0) z += config.synthetic.noise * noise_rng.normal();
      if (std::abs(z - center) <= margin) continue;
      const double label = z > center ? 1.0 : 0.0;
      samples.push_back(Sample{std::move(x), DenseTensor(Shape{1}, {label})});
    }
  } else {
    for (index_t s = 0; s < n; ++s) {
      DenseTensor x = draw_input(input_rng);
      DenseTensor y = teacher.forward(x);
      if (config.synthetic.noise > 0.0) {
        for (index_t i = 0; i < y.size(); ++i)
          y[i] += config.synthetic.noise * noise_rng.normal();
      }
      samples.push_back(Sample{std::move(x), std::move(y)});
    }
  }

  // seeded shuffle, then the leading fraction trains
  std::vector<index_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), index_t{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(split_rng.uniform_index(i));
    std::swap(order[i - 1], order[j]);
  }
  const index_t n_train = std::max<index_t>(
      1, static_cast<index_t>(std::floor(config.training.train_fraction * static_cast<double>(n))));
  for (index_t i = 0; i < n; ++i) {
    Sample& s = samples[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    if (i < n_train)
      data.train.push_back(std::move(s));
    else
      data.test.push_back(std::move(s));
  }
  require(!data.test.empty(), "synth_generate: test split is empty; increase n_samples");
  return data;
}

// -- Model families ----------------------------------------------------------------------

Model build_model(const ExperimentConfig& config, const DenseTensor& adjacency) {
  validate(config);
  require(adjacency.order() == 2 && adjacency.dim(1) == config.nodes,
          "build_model: adjacency size does not match the node mode");
  const ActivationKind act1 = activation_from_string(config.model.activation1);
  const ActivationKind act2 = activation_from_string(config.model.activation2);
  const index_t hidden = config.model.hidden_dim();
  const index_t k1 = config.model.feature_hidden;

  Model model;
  if (config.family == "gtn") {
    std::vector<GraphShiftOperator> gsos;
    gsos.push_back(gso_time_decay(config.time_steps, config.model.time_decay));
    gsos.push_back(gso_gcn(adjacency));
    model.add(std::make_unique<GraphTensorLayer>(
        std::move(gsos), std::vector<std::pair<index_t, index_t>>{{k1, config.features}},
        config.model.gtn_bias));
    model.add(std::make_unique<ActivationLayer>(act1));
    const std::size_t n_factors = config.model.tt_out_factors.size();
    if (n_factors != 3) model.add(std::make_unique<FlattenLayer>());
    const TensorizationPlan plan(config.model.tt_out_factors,
                                 group_input_dims(config, n_factors));
    model.add(std::make_unique<TTDenseLayer>(plan, config.model.tt_ranks, true));
    model.add(std::make_unique<ActivationLayer>(act2));
    model.add(std::make_unique<FlattenLayer>());
    model.add(std::make_unique<DenseLayer>(config.model.output_dim, hidden, true));
  } else if (config.family == "rnn_baseline") {
    model.add(std::make_unique<MatricizeLayer>(1));
    model.add(std::make_unique<RecurrentLayer>(k1, config.nodes * config.features, true));
    model.add(std::make_unique<ActivationLayer>(act1));
    model.add(std::make_unique<FlattenLayer>());
    model.add(std::make_unique<DenseLayer>(hidden, config.time_steps * k1, true));
    model.add(std::make_unique<ActivationLayer>(act2));
    model.add(std::make_unique<DenseLayer>(config.model.output_dim, hidden, true));
  } else {  // gcn_baseline
    model.add(std::make_unique<MatricizeLayer>(2));
    std::vector<GraphShiftOperator> gsos{gso_gcn(adjacency)};
    model.add(std::make_unique<GraphTensorLayer>(
        std::move(gsos),
        std::vector<std::pair<index_t, index_t>>{{k1, config.time_steps * config.features}},
        false));
    model.add(std::make_unique<ActivationLayer>(act1));
    model.add(std::make_unique<FlattenLayer>());
    model.add(std::make_unique<DenseLayer>(hidden, config.nodes * k1, true));
    model.add(std::make_unique<ActivationLayer>(act2));
    model.add(std::make_unique<DenseLayer>(config.model.output_dim, hidden, true));
  }
  if (config.task == "classification") {
    model.add(std::make_unique<ActivationLayer>(ActivationKind::sigmoid));
  }
  return model;
}

index_t count_params(const Model& model) { return model.trainable_param_count(); }

// -- Reports -------------------------------------------------------------------------------

std::string MetricsReport::to_json() const {
  json j;
  j["family"] = family;
  j["task"] = task;
  j["metric"] = {{metric_name, metric_value}};
  j["trainable_params"] = trainable_params;
  j["wall_seconds"] = wall_seconds;
  j["seed"] = seed;
  j["loss_curve"] = loss_curve;
  return j.dump(2);
}

std::string MetricsReport::to_table() const {
  std::string label = family == "gtn" ? "GTN" : (family == "rnn_baseline" ? "RNN" : "GCN");
  std::ostringstream os;
  os << "            " << label << "\n";
  os << (metric_name == "mse" ? "MSE         " : "Accuracy    ") << metric_value << "\n";
  os << "Params      " << trainable_params << "\n";
  return os.str();
}

bool reports_match(const MetricsReport& a, const MetricsReport& b) {
  return a.family == b.family && a.task == b.task && a.metric_name == b.metric_name &&
         a.metric_value == b.metric_value && a.trainable_params == b.trainable_params &&
         a.seed == b.seed && a.loss_curve == b.loss_curve;
}

// -- Experiment runner ------------------------------------------------------------------------

namespace {

struct LoadedData {
  std::vector<Sample> train;
  std::vector<Sample> test;
  DenseTensor adjacency;
};

LoadedData load_csv_dataset(const ExperimentConfig& config) {
  LoadedData data;
  data.adjacency = load_adjacency_csv(config.csv.adjacency_path);
  require(data.adjacency.dim(1) == config.nodes,
          "csv: adjacency size does not match the node mode");

  // infer the sample count from the input grid height
  std::ifstream probe(config.csv.inputs_path);
  if (!probe) throw std::invalid_argument("csv: cannot open " + config.csv.inputs_path);
  index_t file_rows = 0;
  std::string line;
  while (std::getline(probe, line)) {
    if (line.empty() && probe.peek() == std::char_traits<char>::eof()) break;
    ++file_rows;
  }
  const index_t per_sample = config.time_steps * config.nodes;
  require(file_rows % per_sample == 0,
          "csv: input rows (" + std::to_string(file_rows) +
              ") are not a multiple of time_steps*nodes");
  const index_t n_samples = file_rows / per_sample;
  require(n_samples >= 2, "csv: need at least two samples to split");

  const TensorLayout input_layout{{n_samples, config.time_steps, config.nodes},
                                  {config.features}};
  const TensorLayout target_layout{{n_samples}, {config.model.output_dim}};
  const DenseTensor inputs = load_data_tensor(config.csv.inputs_path, input_layout);
  const DenseTensor targets = load_data_tensor(config.csv.targets_path, target_layout);

  const index_t sample_span = config.time_steps * config.nodes * config.features;
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  for (index_t s = 0; s < n_samples; ++s) {
    DenseTensor x(Shape{config.time_steps, config.nodes, config.features});
    std::copy_n(inputs.data() + s * sample_span, sample_span, x.data());
    DenseTensor y(Shape{config.model.output_dim});
    std::copy_n(targets.data() + s * config.model.output_dim, config.model.output_dim, y.data());
    samples.push_back(Sample{std::move(x), std::move(y)});
  }

  Rng split_rng = Rng(config.seed).fork(kSplitStream);
  std::vector<index_t> order(static_cast<std::size_t>(n_samples));
  std::iota(order.begin(), order.end(), index_t{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(split_rng.uniform_index(i));
    std::swap(order[i - 1], order[j]);
  }
  const index_t n_train = std::max<index_t>(
      1, static_cast<index_t>(
             std::floor(config.training.train_fraction * static_cast<double>(n_samples))));
  for (index_t i = 0; i < n_samples; ++i) {
    Sample& s = samples[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    if (i < n_train)
      data.train.push_back(std::move(s));
    else
      data.test.push_back(std::move(s));
  }
  require(!data.test.empty(), "csv: test split is empty");
  return data;
}

}  // namespace

MetricsReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();

  LoadedData data;
  if (config.use_csv) {
    data = load_csv_dataset(config);
  } else {
    SyntheticData synth = synth_generate(config);
    data.train = std::move(synth.train);
    data.test = std::move(synth.test);
    data.adjacency = std::move(synth.adjacency);
  }

  Model model = build_model(config, data.adjacency);
  Rng init_rng = Rng(config.seed).fork(kInitStream);
  model.initialize(init_rng);

  const LossKind loss_kind =
      config.task == "classification" ? LossKind::binary_cross_entropy : LossKind::mse;
  FitConfig fit_config;
  fit_config.adam.learning_rate = config.training.learning_rate;
  fit_config.steps = config.training.steps;
  fit_config.batch_size = config.training.batch_size;
  fit_config.shuffle_seed = Rng(config.seed).fork(kShuffleStream).next_u64();
  FitResult fitted = fit(model, data.train, loss_kind, fit_config);

  MetricsReport report;
  report.family = config.family;
  report.task = config.task;
  report.trainable_params = count_params(model);
  report.seed = config.seed;
  report.loss_curve = std::move(fitted.loss_curve);

  if (config.task == "classification") {
    index_t correct = 0;
    for (const Sample& s : data.test) {
      const DenseTensor y = model.forward(s.input);
      const double predicted = y[0] > 0.5 ? 1.0 : 0.0;
      if (predicted == s.target[0]) ++correct;
    }
    report.metric_name = "accuracy";
    report.metric_value = static_cast<double>(correct) / static_cast<double>(data.test.size());
  } else {
    double acc = 0.0;
    index_t count = 0;
    for (const Sample& s : data.test) {
      const DenseTensor y = model.forward(s.input);
      for (index_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - s.target[i];
        acc += r * r;
      }
      count += y.size();
    }
    report.metric_name = "mse";
    report.metric_value = acc / static_cast<double>(count);
  }

  const auto stop = std::chrono::steady_clock::now();
  report.wall_seconds = std::chrono::duration<double>(stop - start).count();
  return report;
}

}  // namespace gtn
