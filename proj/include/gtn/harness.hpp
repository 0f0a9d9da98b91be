#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtn/graphs.hpp"
#include "gtn/model.hpp"
#include "gtn/tensor.hpp"
#include "gtn/train.hpp"

// Experiment runner: config-driven training of the multi-graph model and its
// two single-domain baselines on user-supplied CSV data or on synthetic tasks
// emitted by a hidden teacher of the same family.

namespace gtn {

/// Domain/feature split with explicit mode sizes; fixes the CSV grid layout
/// (rows enumerate the domain multi-index, columns the feature multi-index,
/// both last-mode-fastest).
struct TensorLayout {
  std::vector<index_t> domain_dims;
  std::vector<index_t> feature_dims;

  Shape shape() const;
  index_t rows() const;
  index_t cols() const;
};

/// Reads a header-free numeric CSV grid as a data tensor. Rejects wrong row or
/// column counts and non-numeric cells (citing 1-based row/column).
DenseTensor load_data_tensor(const std::string& path, const TensorLayout& layout);
/// Writes the exact grid `load_data_tensor` reads back bit-identically.
void save_data_tensor(const std::string& path, const DenseTensor& tensor,
                      const TensorLayout& layout);

/// Square header-free numeric grid.
DenseTensor load_adjacency_csv(const std::string& path);
void save_adjacency_csv(const std::string& path, const DenseTensor& adjacency);

struct SyntheticSpec {
  std::string graph_family = "ring";  // ring | geometric | community
  index_t n_samples = 160;
  std::uint64_t teacher_seed = 1;
  double noise = 0.0;
};

struct CsvDataSpec {
  std::string inputs_path;
  std::string targets_path;
  std::string adjacency_path;
};

struct ModelHyper {
  index_t feature_hidden = 4;                   // K_1 after the feature weight
  std::vector<index_t> tt_out_factors = {2, 2, 2};
  std::vector<index_t> tt_ranks = {2, 2};
  index_t output_dim = 1;
  std::string activation1 = "tanh";
  std::string activation2 = "tanh";
  double time_decay = 0.9;
  bool gtn_bias = true;

  index_t hidden_dim() const;  // prod of tt_out_factors
};

struct TrainingHyper {
  double learning_rate = 1e-2;
  index_t steps = 500;
  index_t batch_size = 0;  // 0 = full batch
  double train_fraction = 0.8;
};

struct ExperimentConfig {
  std::string task = "regression";  // regression | classification
  std::string family = "gtn";       // gtn | rnn_baseline | gcn_baseline
  index_t time_steps = 6;           // I_1
  index_t nodes = 8;                // I_2
  index_t features = 4;             // J_1
  bool use_csv = false;
  SyntheticSpec synthetic;
  CsvDataSpec csv;
  ModelHyper model;
  TrainingHyper training;
  std::uint64_t seed = 42;
};

/// Strict parse: unknown keys anywhere in the document are rejected.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

struct SyntheticData {
  std::vector<Sample> train;
  std::vector<Sample> test;
  DenseTensor adjacency;
  GraphShiftOperator time_gso;  // causal time-decay operator
  GraphShiftOperator task_gso;  // normalized adjacency of the emitted graph
};

/// Data emitted by a hidden graph-tensor teacher on the generated graph, plus
/// optional noise; identical spec and seed give identical output.
SyntheticData synth_generate(const ExperimentConfig& config);

/// Assembles the configured model family. `gtn` is the multi-graph pipeline
/// (graph-tensor layer, TT dense layer, dense readout); the baselines consume
/// the mode-1 / mode-2 matricized input with full dense layers in place of
/// the TT layer.
Model build_model(const ExperimentConfig& config, const DenseTensor& adjacency);

index_t count_params(const Model& model);

struct MetricsReport {
  std::string family;
  std::string task;
  std::string metric_name;  // "mse" or "accuracy"
  double metric_value = 0.0;
  index_t trainable_params = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> loss_curve;

  std::string to_json() const;
  std::string to_table() const;
};

/// Equality up to the wall clock (which is not part of the deterministic
/// contract).
bool reports_match(const MetricsReport& a, const MetricsReport& b);

MetricsReport run_experiment(const ExperimentConfig& config);

}  // namespace gtn
