#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gtn/equivalence.hpp"
#include "gtn/harness.hpp"
#include "gtn/rng.hpp"
#include "gtn/tensor.hpp"
#include "gtn/train.hpp"
#include "gtn/tt.hpp"

namespace {

using gtn::index_t;

std::vector<index_t> parse_int_list(const std::string& text, const char* what) {
  std::vector<index_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos
                                                    ? std::string::npos
                                                    : comma - start);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<index_t>(v));
    } catch (const std::exception&) {
      throw CLI::ValidationError(std::string(what) + ": expected positive integers, got \"" +
                                 item + "\"");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// plan syntax: one K:J pair per core, e.g. "2:2,2:2,2:2"
void parse_plan(const std::string& text, std::vector<index_t>* rows,
                std::vector<index_t>* cols) {
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string pair = text.substr(start, comma == std::string::npos
                                                    ? std::string::npos
                                                    : comma - start);
    const std::size_t colon = pair.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--plan: expected K:J pairs, got \"" + pair + "\"");
    rows->push_back(parse_int_list(pair.substr(0, colon), "--plan").front());
    cols->push_back(parse_int_list(pair.substr(colon + 1), "--plan").front());
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
}

int cmd_run(const std::string& config_path, const std::string& out_path) {
  const gtn::ExperimentConfig config = gtn::load_experiment_config(config_path);
  const gtn::MetricsReport report = gtn::run_experiment(config);
  std::cout << report.to_table();
  std::printf("wall_seconds=%.3f\n", report.wall_seconds);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << report.to_json() << "\n";
    std::cout << "report written to " << out_path << "\n";
  }
  return 0;
}

int cmd_check_grad(double h, double tolerance, std::uint64_t seed) {
  // desk-scale multi-graph pipeline: I1=6, I2=8, J1=4, TT ranks 2
  gtn::ExperimentConfig config;
  config.synthetic.n_samples = 8;
  config.seed = seed;
  const gtn::SyntheticData data = gtn::synth_generate(config);
  gtn::Model model = gtn::build_model(config, data.adjacency);
  gtn::Rng init_rng(seed);
  model.initialize(init_rng);
  gtn::Rng data_rng(seed + 1);
  gtn::DenseTensor x(gtn::Shape{config.time_steps, config.nodes, config.features});
  for (index_t i = 0; i < x.size(); ++i) x[i] = data_rng.uniform(-1.0, 1.0);
  gtn::DenseTensor target(gtn::Shape{1}, {data_rng.uniform(-1.0, 1.0)});

  const gtn::FdCheckReport report =
      gtn::fd_check(model, x, target, gtn::LossKind::mse, h, tolerance);
  std::printf("parameters=%lld\n", static_cast<long long>(report.parameters_checked));
  std::printf("step=%g\n", report.step);
  std::printf("max_rel_error=%.6e\n", report.max_rel_error);
  std::printf("worst_parameter=%s\n", report.worst_parameter.c_str());
  std::printf("tolerance=%g\n", report.tolerance);
  std::printf("result=%s\n", report.pass ? "PASS" : "FAIL");
  return report.pass ? 0 : 1;
}

int cmd_equiv(std::uint64_t seed) {
  const auto reports = gtn::run_equivalence_suite(seed);
  bool all_pass = true;
  for (const auto& r : reports) {
    std::printf("%-18s instances=%-4lld max_error=%.3e tolerance=%.1e %s\n", r.name.c_str(),
                static_cast<long long>(r.instances), r.max_abs_error, r.tolerance,
                r.pass ? "PASS" : "FAIL");
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

int cmd_compress(index_t rows, index_t cols, const std::string& plan_text,
                 const std::string& ranks_text) {
  std::vector<index_t> row_factors, col_factors;
  parse_plan(plan_text, &row_factors, &col_factors);
  const gtn::TensorizationPlan plan(row_factors, col_factors);
  if (plan.matrix_rows() != rows || plan.matrix_cols() != cols) {
    throw CLI::ValidationError("--plan factors do not multiply to --rows/--cols");
  }
  std::vector<index_t> ranks;
  if (!ranks_text.empty()) ranks = parse_int_list(ranks_text, "--ranks");
  if (static_cast<index_t>(ranks.size()) != plan.order() - 1) {
    throw CLI::ValidationError("--ranks: need one rank per interior bond (" +
                               std::to_string(plan.order() - 1) + ")");
  }
  const index_t dense = gtn::dense_param_count(plan);
  const index_t tt = gtn::tt_param_count(plan, ranks);
  const double pct = 100.0 * (1.0 - static_cast<double>(tt) / static_cast<double>(dense));
  std::printf("dense_params=%lld\n", static_cast<long long>(dense));
  std::printf("tt_params=%lld\n", static_cast<long long>(tt));
  std::printf("compression_pct=%.2f\n", pct);
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  const gtn::ExperimentConfig config = gtn::load_experiment_config(spec_path);
  const gtn::SyntheticData data = gtn::synth_generate(config);
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);

  const index_t total = static_cast<index_t>(data.train.size() + data.test.size());
  const gtn::TensorLayout input_layout{{total, config.time_steps, config.nodes},
                                       {config.features}};
  const gtn::TensorLayout target_layout{{total}, {config.model.output_dim}};
  gtn::DenseTensor inputs(input_layout.shape());
  gtn::DenseTensor targets(target_layout.shape());
  index_t cursor = 0;
  const auto emit = [&](const gtn::Sample& s) {
    std::copy_n(s.input.data(), s.input.size(), inputs.data() + cursor * s.input.size());
    std::copy_n(s.target.data(), s.target.size(),
                targets.data() + cursor * s.target.size());
    ++cursor;
  };
  for (const auto& s : data.train) emit(s);
  for (const auto& s : data.test) emit(s);

  gtn::save_data_tensor((dir / "inputs.csv").string(), inputs, input_layout);
  gtn::save_data_tensor((dir / "targets.csv").string(), targets, target_layout);
  gtn::save_adjacency_csv((dir / "adjacency.csv").string(), data.adjacency);
  std::ofstream((dir / "spec.json").string()) << gtn::config_to_json(config) << "\n";
  std::printf("samples=%lld (train %lld, test %lld)\n", static_cast<long long>(total),
              static_cast<long long>(data.train.size()),
              static_cast<long long>(data.test.size()));
  std::printf("wrote inputs.csv targets.csv adjacency.csv spec.json to %s\n",
              out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph tensor network engine"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "train and evaluate a configured experiment");
  std::string config_path, out_path;
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_path, "write the metrics report as JSON");

  auto* check = app.add_subcommand("check", "self checks");
  bool grad = false;
  double fd_step = 1e-5, fd_tolerance = 1e-5;
  std::uint64_t check_seed = 42;
  check->add_flag("--grad", grad, "finite-difference check of every trainable parameter");
  check->add_option("--step", fd_step, "central-difference step");
  check->add_option("--tolerance", fd_tolerance, "max relative error allowed");
  check->add_option("--seed", check_seed, "seed for the model and probe data");

  auto* equiv = app.add_subcommand(
      "equiv", "classical architectures vs their graph tensor network reductions");
  std::uint64_t equiv_seed = 20240801;
  equiv->add_option("--seed", equiv_seed, "seed for random instances");

  auto* compress = app.add_subcommand("compress", "dense vs tensor-train parameter counts");
  index_t rows = 0, cols = 0;
  std::string plan_text, ranks_text;
  compress->add_option("--rows", rows, "matrix rows K")->required();
  compress->add_option("--cols", cols, "matrix cols J")->required();
  compress->add_option("--plan", plan_text, "per-core K:J factor pairs, e.g. 2:2,2:2")
      ->required();
  compress->add_option("--ranks", ranks_text, "interior TT ranks, e.g. 2,2");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset to CSV");
  std::string spec_path, synth_out;
  synth->add_option("--spec", spec_path, "synthetic spec (JSON, experiment config schema)")
      ->required();
  synth->add_option("--out", synth_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_path);
    if (check->parsed()) {
      if (!grad) {
        std::cerr << "check: nothing to do (use --grad)\n";
        return 2;
      }
      return cmd_check_grad(fd_step, fd_tolerance, check_seed);
    }
    if (equiv->parsed()) return cmd_equiv(equiv_seed);
    if (compress->parsed()) return cmd_compress(rows, cols, plan_text, ranks_text);
    if (synth->parsed()) return cmd_synth(spec_path, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
