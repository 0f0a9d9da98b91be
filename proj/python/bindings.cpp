#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "gtn/equivalence.hpp"
#include "gtn/graphs.hpp"
#include "gtn/harness.hpp"
#include "gtn/layers.hpp"
#include "gtn/tensor.hpp"
#include "gtn/tt.hpp"

namespace py = pybind11;

namespace {

using gtn::DenseTensor;
using gtn::index_t;
using gtn::Shape;

DenseTensor tensor_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  std::vector<index_t> dims;
  for (py::ssize_t i = 0; i < a.ndim(); ++i) dims.push_back(static_cast<index_t>(a.shape(i)));
  DenseTensor t((Shape(dims)));
  std::memcpy(t.data(), a.data(), sizeof(double) * static_cast<std::size_t>(t.size()));
  return t;
}

py::array_t<double> array_from_tensor(const DenseTensor& t) {
  std::vector<py::ssize_t> shape;
  for (index_t d : t.shape().dims()) shape.push_back(static_cast<py::ssize_t>(d));
  py::array_t<double> a(shape);
  std::memcpy(a.mutable_data(), t.data(), sizeof(double) * static_cast<std::size_t>(t.size()));
  return a;
}

using InputArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

gtn::GTNLayerSpec make_layer_spec(const std::vector<InputArray>& gsos,
                                  const std::vector<InputArray>& weights,
                                  const std::optional<InputArray>& bias,
                                  const std::string& activation) {
  gtn::GTNLayerSpec layer;
  for (const auto& s : gsos) layer.domain_gsos.push_back(gtn::gso_custom(tensor_from_array(s)));
  for (const auto& w : weights) layer.feature_weights.push_back(tensor_from_array(w));
  if (bias) layer.bias = tensor_from_array(*bias);
  layer.activation = gtn::activation_from_string(activation);
  return layer;
}

}  // namespace

PYBIND11_MODULE(gtnet, m) {
  m.doc() = "graph tensor network engine: Tucker-product forward passes, "
            "tensor-train weights, graph shift operators";

  // tensor algebra
  m.def(
      "contract",
      [](const InputArray& a, index_t n, const InputArray& b, index_t mode) {
        return array_from_tensor(
            gtn::contract(tensor_from_array(a), n, tensor_from_array(b), mode));
      },
      py::arg("a"), py::arg("n"), py::arg("b"), py::arg("m"),
      "(n, m)-tensor contraction over 1-based modes");
  m.def(
      "mode_n_product",
      [](const InputArray& a, index_t n, const InputArray& b) {
        return array_from_tensor(gtn::mode_n_product(tensor_from_array(a), n, tensor_from_array(b)));
      },
      py::arg("a"), py::arg("n"), py::arg("b"));
  m.def(
      "tucker_product",
      [](const InputArray& a, const std::vector<std::pair<index_t, InputArray>>& factors) {
        std::vector<gtn::ModeFactor> fs;
        for (const auto& [mode, matrix] : factors)
          fs.push_back(gtn::ModeFactor{mode, tensor_from_array(matrix)});
        return array_from_tensor(gtn::tucker_product(tensor_from_array(a), fs));
      },
      py::arg("a"), py::arg("factors"), "factors: list of (mode, matrix) pairs");
  m.def(
      "kronecker",
      [](const InputArray& a, const InputArray& b) {
        return array_from_tensor(gtn::kronecker(tensor_from_array(a), tensor_from_array(b)));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "matricize",
      [](const InputArray& a, index_t n) {
        return array_from_tensor(gtn::matricize(tensor_from_array(a), n));
      },
      py::arg("a"), py::arg("n"));

  // tensor-train operators
  py::class_<gtn::TTOperator>(m, "TTOperator")
      .def(py::init([](const std::vector<InputArray>& cores) {
             std::vector<DenseTensor> cs;
             for (const auto& c : cores) cs.push_back(tensor_from_array(c));
             return gtn::TTOperator(std::move(cs));
           }),
           py::arg("cores"))
      .def_static("identity", &gtn::TTOperator::identity, py::arg("dims"))
      .def_property_readonly("cores",
                             [](const gtn::TTOperator& op) {
                               std::vector<py::array_t<double>> out;
                               for (const auto& c : op.cores()) out.push_back(array_from_tensor(c));
                               return out;
                             })
      .def_property_readonly("ranks", &gtn::TTOperator::ranks)
      .def_property_readonly("input_dims", &gtn::TTOperator::input_dims)
      .def_property_readonly("output_dims", &gtn::TTOperator::output_dims)
      .def("reconstruct",
           [](const gtn::TTOperator& op) { return array_from_tensor(gtn::tt_reconstruct(op)); })
      .def(
          "apply",
          [](const gtn::TTOperator& op, const InputArray& x) {
            return array_from_tensor(gtn::tt_apply(op, tensor_from_array(x)));
          },
          py::arg("x"))
      .def("param_count",
           [](const gtn::TTOperator& op) { return gtn::tt_param_count(op); });

  m.def(
      "tt_from_matrix",
      [](const InputArray& w, const std::vector<index_t>& row_factors,
         const std::vector<index_t>& col_factors, const std::optional<std::vector<index_t>>& max_ranks,
         double epsilon) {
        gtn::TTBudget budget;
        if (max_ranks) budget.max_ranks = *max_ranks;
        budget.epsilon = epsilon;
        gtn::TTDecomposition dec = gtn::tt_from_matrix(
            tensor_from_array(w), gtn::TensorizationPlan(row_factors, col_factors), budget);
        return py::make_tuple(dec.op, dec.frobenius_error);
      },
      py::arg("w"), py::arg("row_factors"), py::arg("col_factors"),
      py::arg("max_ranks") = std::nullopt, py::arg("epsilon") = 0.0,
      "returns (operator, frobenius_error)");
  m.def(
      "tt_param_count",
      [](const std::vector<index_t>& row_factors, const std::vector<index_t>& col_factors,
         const std::vector<index_t>& interior_ranks) {
        return gtn::tt_param_count(gtn::TensorizationPlan(row_factors, col_factors),
                                   interior_ranks);
      },
      py::arg("row_factors"), py::arg("col_factors"), py::arg("interior_ranks"));
  m.def(
      "dense_param_count",
      [](const std::vector<index_t>& row_factors, const std::vector<index_t>& col_factors) {
        return gtn::dense_param_count(gtn::TensorizationPlan(row_factors, col_factors));
      },
      py::arg("row_factors"), py::arg("col_factors"));
  m.def(
      "convolution_tensor",
      [](index_t size, index_t kernel_size) {
        return array_from_tensor(gtn::convolution_tensor(size, kernel_size));
      },
      py::arg("size"), py::arg("kernel_size"));

  // graph shift operators (returned as plain matrices)
  m.def(
      "gso_gcn",
      [](const InputArray& adjacency) {
        return array_from_tensor(gtn::gso_gcn(tensor_from_array(adjacency)).matrix);
      },
      py::arg("adjacency"));
  m.def(
      "gso_circulant",
      [](const InputArray& kernel, index_t size) {
        return array_from_tensor(gtn::gso_circulant(tensor_from_array(kernel), size).matrix);
      },
      py::arg("kernel"), py::arg("size"));
  m.def(
      "gso_time_decay",
      [](index_t size, double decay) {
        return array_from_tensor(gtn::gso_time_decay(size, decay).matrix);
      },
      py::arg("size"), py::arg("decay"));
  m.def(
      "gso_attention",
      [](const InputArray& x, const InputArray& wq, const InputArray& wk, double dk) {
        return array_from_tensor(gtn::gso_attention(tensor_from_array(x), tensor_from_array(wq),
                                                    tensor_from_array(wk), dk)
                                     .matrix);
      },
      py::arg("x"), py::arg("wq"), py::arg("wk"), py::arg("dk"));
  m.def(
      "graph_shift",
      [](const InputArray& s, const InputArray& x) {
        return array_from_tensor(
            gtn::graph_shift(gtn::gso_custom(tensor_from_array(s)), tensor_from_array(x)));
      },
      py::arg("s"), py::arg("x"));

  // forward passes
  m.def(
      "gtn_forward",
      [](const InputArray& x, index_t domain_modes, index_t feature_modes,
         const std::vector<InputArray>& gsos, const std::vector<InputArray>& weights,
         const std::optional<InputArray>& bias, const std::string& activation) {
        return array_from_tensor(
            gtn::gtn_forward(tensor_from_array(x), gtn::DataTensorMeta{domain_modes, feature_modes},
                             make_layer_spec(gsos, weights, bias, activation)));
      },
      py::arg("x"), py::arg("domain_modes"), py::arg("feature_modes"), py::arg("gsos"),
      py::arg("weights"), py::arg("bias") = std::nullopt, py::arg("activation") = "identity");
  m.def(
      "dnn_forward",
      [](const InputArray& x, const InputArray& w) {
        return array_from_tensor(gtn::dnn_forward(tensor_from_array(x), tensor_from_array(w)));
      },
      py::arg("x"), py::arg("w"));
  m.def(
      "gcn_forward",
      [](const InputArray& x, const InputArray& adjacency, const InputArray& w) {
        return array_from_tensor(gtn::gcn_forward(tensor_from_array(x),
                                                  tensor_from_array(adjacency),
                                                  tensor_from_array(w)));
      },
      py::arg("x"), py::arg("adjacency"), py::arg("w"));
  m.def(
      "cnn_forward",
      [](const InputArray& x, const InputArray& kernel) {
        return array_from_tensor(gtn::cnn_forward(tensor_from_array(x), tensor_from_array(kernel)));
      },
      py::arg("x"), py::arg("kernel"));
  m.def(
      "attention_forward",
      [](const InputArray& x, const InputArray& wq, const InputArray& wk, const InputArray& wv,
         double dk) {
        return array_from_tensor(gtn::attention_forward(tensor_from_array(x),
                                                        tensor_from_array(wq),
                                                        tensor_from_array(wk),
                                                        tensor_from_array(wv), dk));
      },
      py::arg("x"), py::arg("wq"), py::arg("wk"), py::arg("wv"), py::arg("dk"));
  m.def(
      "rnn_unrolled",
      [](const InputArray& x, const InputArray& wr, const InputArray& wx) {
        return array_from_tensor(gtn::rnn_unrolled(tensor_from_array(x), tensor_from_array(wr),
                                                   tensor_from_array(wx)));
      },
      py::arg("x"), py::arg("wr"), py::arg("wx"));
  m.def(
      "rnn_closed_form",
      [](const InputArray& x, const InputArray& w1, const InputArray& wx, double decay) {
        return array_from_tensor(gtn::rnn_closed_form(tensor_from_array(x), tensor_from_array(w1),
                                                      tensor_from_array(wx), decay));
      },
      py::arg("x"), py::arg("w1"), py::arg("wx"), py::arg("decay"));

  // equivalence suite and experiments
  m.def(
      "run_equivalence_suite",
      [](std::uint64_t seed) {
        py::list out;
        for (const auto& r : gtn::run_equivalence_suite(seed)) {
          py::dict d;
          d["name"] = r.name;
          d["instances"] = r.instances;
          d["max_abs_error"] = r.max_abs_error;
          d["tolerance"] = r.tolerance;
          d["pass"] = r.pass;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 20240801);
  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const gtn::MetricsReport report =
            gtn::run_experiment(gtn::parse_experiment_config(config_json));
        return py::module_::import("json").attr("loads")(report.to_json());
      },
      py::arg("config_json"), "config_json: experiment config as a JSON string");
}
