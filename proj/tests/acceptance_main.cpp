// Acceptance suite: one pass/fail line per criterion, exit 0 only if all pass.
// Criteria 1, 3 and 5 drive the command line tool (path via --cli); the rest
// run in-process.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gtn/equivalence.hpp"
#include "gtn/graphs.hpp"
#include "gtn/harness.hpp"
#include "gtn/rng.hpp"
#include "gtn/tensor.hpp"
#include "gtn/tt.hpp"

using namespace gtn;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buffer;
  while (std::size_t n = fread(buffer.data(), 1, buffer.size(), pipe))
    result.output.append(buffer.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

struct Criterion {
  Criterion(int n, std::string text) : number(n), summary(std::move(text)) {}
  int number;
  std::string summary;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

std::string g_cli_path;

Criterion criterion_1_compression() {
  Criterion c{1, "tensorized weight compression counts match the reference example"};
  const auto start = std::chrono::steady_clock::now();
  if (g_cli_path.empty()) {
    c.detail = "cli path not provided";
    return c;
  }
  const CommandResult r = run_command(
      g_cli_path +
      " compress --rows 256 --cols 256 --plan 2:2,2:2,2:2,2:2,2:2,2:2,2:2,2:2 "
      "--ranks 2,2,2,2,2,2,2");
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto kv = parse_key_values(r.output);
  const bool values_ok = kv.count("dense_params") && kv.count("tt_params") &&
                         kv.count("compression_pct") && kv.at("dense_params") == "65536" &&
                         kv.at("tt_params") == "112" && kv.at("compression_pct") == "99.83";
  c.pass = r.exit_code == 0 && values_ok && c.seconds < 1.0;
  c.detail = "dense=" + (kv.count("dense_params") ? kv.at("dense_params") : "?") +
             " tt=" + (kv.count("tt_params") ? kv.at("tt_params") : "?") +
             " pct=" + (kv.count("compression_pct") ? kv.at("compression_pct") : "?");
  return c;
}

Criterion criterion_2_tucker_vectorization() {
  Criterion c{2, "Tucker products vectorize to Kronecker-matrix products (200 cases)"};
  const auto start = std::chrono::steady_clock::now();
  Rng rng(424242);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const index_t order = 1 + static_cast<index_t>(rng.uniform_index(4));
    std::vector<index_t> dims;
    for (index_t k = 0; k < order; ++k)
      dims.push_back(1 + static_cast<index_t>(rng.uniform_index(5)));
    DenseTensor a((Shape(dims)));
    for (index_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(-1.0, 1.0);
    std::vector<ModeFactor> factors;
    DenseTensor kron = DenseTensor::identity(1);
    for (index_t n = 1; n <= order; ++n) {
      const index_t out = 1 + static_cast<index_t>(rng.uniform_index(5));
      DenseTensor b(Shape{out, a.dim(n)});
      for (index_t i = 0; i < b.size(); ++i) b[i] = rng.uniform(-1.0, 1.0);
      factors.push_back(ModeFactor{n, b});
      kron = n == 1 ? b : kronecker(kron, b);
    }
    const DenseTensor lhs = vectorize(tucker_product(a, factors));
    const DenseTensor rhs = vectorize(matmul(kron, matricize(vectorize(a), 1)));
    worst = std::max(worst, max_abs_diff(lhs, rhs));
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.pass = worst < 1e-10 && c.seconds < 10.0;
  std::ostringstream os;
  os << "max |vec(tucker) - kron*vec| = " << worst;
  c.detail = os.str();
  return c;
}

Criterion criterion_3_equivalences() {
  Criterion c{3, "classical architectures agree with their graph tensor reductions"};
  const auto start = std::chrono::steady_clock::now();
  if (g_cli_path.empty()) {
    c.detail = "cli path not provided";
    return c;
  }
  const CommandResult r = run_command(g_cli_path + " equiv");
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  // expected names, instance counts and tolerances, straight from the suite
  const std::map<std::string, std::pair<long long, double>> expected{
      {"dnn", {100, 1e-12}},      {"gcn", {100, 1e-12}},
      {"cnn", {100, 1e-12}},      {"attention", {100, 1e-12}},
      {"rnn", {50, 1e-8}},        {"rnn_gcn_reduction", {20, 0.0}},
  };
  std::map<std::string, bool> seen;
  bool rows_ok = true;
  std::istringstream lines(r.output);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string name, instances_field, error_field, tolerance_field, verdict;
    if (!(fields >> name >> instances_field >> error_field >> tolerance_field >> verdict))
      continue;
    const auto it = expected.find(name);
    if (it == expected.end()) continue;
    seen[name] = true;
    long long instances = -1;
    double max_error = 1.0;
    try {
      instances = std::stoll(instances_field.substr(instances_field.find('=') + 1));
      max_error = std::stod(error_field.substr(error_field.find('=') + 1));
    } catch (const std::exception&) {
      rows_ok = false;
      continue;
    }
    const bool exact = it->second.second == 0.0;
    rows_ok = rows_ok && verdict == "PASS" && instances == it->second.first &&
              (exact ? max_error == 0.0 : max_error < it->second.second);
  }
  c.pass = r.exit_code == 0 && rows_ok && seen.size() == expected.size() && c.seconds < 30.0;
  c.detail = "gtn equiv exit=" + std::to_string(r.exit_code) + ", " +
             std::to_string(seen.size()) + "/6 checks parsed";
  return c;
}

Criterion criterion_4_convolution_tensor() {
  Criterion c{4, "convolution tensor: circulant action exact, rank-2 TT structure exact"};
  const auto start = std::chrono::steady_clock::now();
  Rng rng(777);
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const index_t taps = 1 + static_cast<index_t>(rng.uniform_index(5));     // P <= 5
    const index_t size = taps + 1 + static_cast<index_t>(rng.uniform_index(
                                        static_cast<std::uint64_t>(16 - taps)));  // I <= 16
    DenseTensor x(Shape{size}), kernel(Shape{taps});
    for (index_t i = 0; i < size; ++i)
      x[i] = static_cast<double>(static_cast<int>(rng.uniform_index(19)) - 9);
    for (index_t p = 0; p < taps; ++p)
      kernel[p] = static_cast<double>(static_cast<int>(rng.uniform_index(19)) - 9);

    const DenseTensor conv = convolution_tensor(size, taps);
    const DenseTensor s = contract(conv, 3, kernel, 1);
    // circulant: every row is the cyclic shift of the row above
    for (index_t i = 0; i + 1 < size && ok; ++i)
      for (index_t j = 0; j < size && ok; ++j)
        ok = s.at({i + 1, (j + 1) % size}) == s.at({i, j});
    // S x equals the direct circular convolution exactly on integer inputs
    const DenseTensor y = mode_n_product(x, 1, s);
    for (index_t i = 0; i < size && ok; ++i) {
      double direct = 0.0;
      for (index_t p = 0; p < taps; ++p) direct += kernel[p] * x[(i + p) % size];
      ok = y[i] == direct;
    }
    if (!ok) break;
  }

  // rank-2 tensor train reconstruction of the matricized convolution tensor
  const DenseTensor m = matricize(convolution_tensor(16, 2), 1);
  const TensorizationPlan plan({2, 2, 2, 2, 1}, {2, 2, 2, 2, 2});
  const TTDecomposition dec = tt_from_matrix(m, plan, TTBudget::ranks({2, 2, 2, 2}));
  const bool qtt_ok = dec.frobenius_error < 1e-10;

  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.pass = ok && qtt_ok;
  std::ostringstream os;
  os << "circulant action " << (ok ? "exact" : "MISMATCH") << ", rank-2 reconstruction error "
     << dec.frobenius_error;
  c.detail = os.str();
  return c;
}

Criterion criterion_5_gradients() {
  Criterion c{5, "analytic gradients match central differences on the full pipeline"};
  const auto start = std::chrono::steady_clock::now();
  if (g_cli_path.empty()) {
    c.detail = "cli path not provided";
    return c;
  }
  const CommandResult r = run_command(g_cli_path + " check --grad");
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto kv = parse_key_values(r.output);
  double max_rel = 1.0;
  if (kv.count("max_rel_error")) max_rel = std::stod(kv.at("max_rel_error"));
  c.pass = r.exit_code == 0 && kv.count("result") && kv.at("result") == "PASS" &&
           max_rel < 1e-5 && c.seconds < 60.0;
  c.detail = "max_rel_error=" + (kv.count("max_rel_error") ? kv.at("max_rel_error") : "?") +
             " over " + (kv.count("parameters") ? kv.at("parameters") : "?") + " parameters";
  return c;
}

Criterion criterion_6_realizability() {
  Criterion c{6, "matching student reaches test mse < 1e-4 on noiseless teacher data"};
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config;
  config.synthetic.n_samples = 300;
  config.synthetic.noise = 0.0;
  config.model.activation1 = "identity";
  config.model.activation2 = "identity";
  config.model.gtn_bias = false;
  config.model.feature_hidden = 2;
  config.model.tt_out_factors = {2, 2};
  config.model.tt_ranks = {2};
  config.training.steps = 2000;
  config.training.learning_rate = 5e-2;
  config.training.batch_size = 0;
  config.seed = 42;
  const MetricsReport first = run_experiment(config);
  const MetricsReport second = run_experiment(config);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.pass = first.metric_value < 1e-4 && reports_match(first, second) && c.seconds < 120.0;
  std::ostringstream os;
  os << "test mse " << first.metric_value << " within " << config.training.steps
     << " steps, deterministic " << (reports_match(first, second) ? "yes" : "NO");
  c.detail = os.str();
  return c;
}

Criterion criterion_7_parameter_ordering() {
  Criterion c{7, "multi-graph model trains fewer parameters than both baselines"};
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config;  // default desk-scale configuration
  config.synthetic.n_samples = 8;
  const SyntheticData data = synth_generate(config);
  ExperimentConfig rnn = config, gcn = config;
  rnn.family = "rnn_baseline";
  gcn.family = "gcn_baseline";
  const index_t gtn_count = count_params(build_model(config, data.adjacency));
  const index_t rnn_count = count_params(build_model(rnn, data.adjacency));
  const index_t gcn_count = count_params(build_model(gcn, data.adjacency));
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.pass = gtn_count < rnn_count && gtn_count < gcn_count;
  std::ostringstream os;
  os << "gtn " << gtn_count << " < rnn " << rnn_count << ", gcn " << gcn_count;
  c.detail = os.str();
  return c;
}

Criterion criterion_8_non_reproducibility_statement() {
  Criterion c{8, "reported benchmark metrics are not acceptance targets"};
  c.pass = true;
  c.detail =
      "the published accuracy/mse/parameter figures (53.67%, 0.0188, 585, ...) depend on "
      "datasets, hidden sizes and training hyperparameters that are not specified; "
      "criteria 1-7 are property- and oracle-based instead";
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") g_cli_path = argv[i + 1];
  }

  std::vector<Criterion> results;
  results.push_back(criterion_1_compression());
  results.push_back(criterion_2_tucker_vectorization());
  results.push_back(criterion_3_equivalences());
  results.push_back(criterion_4_convolution_tensor());
  results.push_back(criterion_5_gradients());
  results.push_back(criterion_6_realizability());
  results.push_back(criterion_7_parameter_ordering());
  results.push_back(criterion_8_non_reproducibility_statement());

  bool all_pass = true;
  for (const auto& c : results) {
    std::printf("criterion %d [%s] %s (%.2f s) -- %s\n", c.number, c.pass ? "PASS" : "FAIL",
                c.summary.c_str(), c.seconds, c.detail.c_str());
    all_pass = all_pass && c.pass;
  }
  std::printf("acceptance: %s\n", all_pass ? "ALL PASS" : "FAILURES");
  return all_pass ? 0 : 1;
}
