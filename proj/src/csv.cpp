#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtn/harness.hpp"

namespace gtn {

using detail::require;

Shape TensorLayout::shape() const {
  std::vector<index_t> dims = domain_dims;
  dims.insert(dims.end(), feature_dims.begin(), feature_dims.end());
  return Shape(dims);
}

index_t TensorLayout::rows() const {
  index_t p = 1;
  for (index_t d : domain_dims) p *= d;
  return p;
}

index_t TensorLayout::cols() const {
  index_t p = 1;
  for (index_t d : feature_dims) p *= d;
  return p;
}

namespace {

std::vector<std::vector<double>> read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("csv: cannot open " + path);
  std::vector<std::vector<double>> grid;
  std::string line;
  index_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    ++row;
    std::vector<double> cells;
    std::size_t start = 0;
    index_t col = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      ++col;
      // trim surrounding spaces
      std::size_t a = start, b = end;
      while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
      while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(line.data() + a, line.data() + b, value);
      if (ec != std::errc{} || ptr != line.data() + b) {
        throw std::invalid_argument("csv: " + path + ": non-numeric cell at row " +
                                    std::to_string(row) + " col " + std::to_string(col));
      }
      cells.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    grid.push_back(std::move(cells));
  }
  require(!grid.empty(), "csv: " + path + " is empty");
  return grid;
}

std::string format_cell(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

DenseTensor load_data_tensor(const std::string& path, const TensorLayout& layout) {
  const auto grid = read_grid(path);
  const index_t rows = layout.rows();
  const index_t cols = layout.cols();
  require(static_cast<index_t>(grid.size()) == rows,
          "csv: " + path + ": expected " + std::to_string(rows) + " rows, found " +
              std::to_string(grid.size()));
  DenseTensor out(layout.shape());
  for (index_t r = 0; r < rows; ++r) {
    const auto& line = grid[static_cast<std::size_t>(r)];
    require(static_cast<index_t>(line.size()) == cols,
            "csv: " + path + ": row " + std::to_string(r + 1) + " has " +
                std::to_string(line.size()) + " columns, expected " + std::to_string(cols));
    for (index_t c = 0; c < cols; ++c) out[r * cols + c] = line[static_cast<std::size_t>(c)];
  }
  return out;
}

void save_data_tensor(const std::string& path, const DenseTensor& tensor,
                      const TensorLayout& layout) {
  require(tensor.shape() == layout.shape(),
          "csv: tensor shape " + tensor.shape().to_string() + " does not match layout");
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("csv: cannot write " + path);
  const index_t rows = layout.rows();
  const index_t cols = layout.cols();
  for (index_t r = 0; r < rows; ++r) {
    for (index_t c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << format_cell(tensor[r * cols + c]);
    }
    out << '\n';
  }
}

DenseTensor load_adjacency_csv(const std::string& path) {
  const auto grid = read_grid(path);
  const index_t n = static_cast<index_t>(grid.size());
  DenseTensor a(Shape{n, n});
  for (index_t r = 0; r < n; ++r) {
    require(static_cast<index_t>(grid[static_cast<std::size_t>(r)].size()) == n,
            "csv: " + path + ": adjacency grid is not square at row " + std::to_string(r + 1));
    for (index_t c = 0; c < n; ++c)
      a[r * n + c] = grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return a;
}

void save_adjacency_csv(const std::string& path, const DenseTensor& adjacency) {
  require(adjacency.order() == 2 && adjacency.dim(1) == adjacency.dim(2),
          "csv: adjacency must be square");
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("csv: cannot write " + path);
  const index_t n = adjacency.dim(1);
  for (index_t r = 0; r < n; ++r) {
    for (index_t c = 0; c < n; ++c) {
      if (c) out << ',';
      out << format_cell(adjacency[r * n + c]);
    }
    out << '\n';
  }
}

}  // namespace gtn
