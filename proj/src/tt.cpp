#include "gtn/tt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gtn {

using detail::require;

namespace {

index_t product(const std::vector<index_t>& v) {
  index_t p = 1;
  for (index_t d : v) p *= d;
  return p;
}

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

// -- TensorizationPlan ---------------------------------------------------------

TensorizationPlan::TensorizationPlan(std::vector<index_t> rows, std::vector<index_t> cols)
    : row_factors(std::move(rows)), col_factors(std::move(cols)) {
  require(!row_factors.empty(), "TensorizationPlan: needs at least one factor");
  require(row_factors.size() == col_factors.size(),
          "TensorizationPlan: row/col factor counts differ");
  for (index_t d : row_factors) require(d >= 1, "TensorizationPlan: factors must be >= 1");
  for (index_t d : col_factors) require(d >= 1, "TensorizationPlan: factors must be >= 1");
}

index_t TensorizationPlan::matrix_rows() const { return product(row_factors); }
index_t TensorizationPlan::matrix_cols() const { return product(col_factors); }

// -- TTOperator ------------------------------------------------------------------

TTOperator::TTOperator(std::vector<DenseTensor> cores) : cores_(std::move(cores)) {
  require(!cores_.empty(), "TTOperator: needs at least one core");
  index_t prev_rank = 1;
  for (std::size_t n = 0; n < cores_.size(); ++n) {
    const DenseTensor& g = cores_[n];
    require(g.order() == 4, "TTOperator: core " + std::to_string(n) + " must be order-4");
    require(g.dim(1) == prev_rank,
            "TTOperator: rank mismatch entering core " + std::to_string(n));
    prev_rank = g.dim(4);
  }
  require(prev_rank == 1, "TTOperator: final rank must be 1");
}

TTOperator TTOperator::identity(const std::vector<index_t>& dims) {
  require(!dims.empty(), "TTOperator::identity: needs at least one dimension");
  std::vector<DenseTensor> cores;
  cores.reserve(dims.size());
  for (index_t d : dims) {
    DenseTensor g(Shape{1, d, d, 1});
    for (index_t i = 0; i < d; ++i) g[i * d + i] = 1.0;
    cores.push_back(std::move(g));
  }
  return TTOperator(std::move(cores));
}

std::vector<index_t> TTOperator::output_dims() const {
  std::vector<index_t> dims;
  for (const auto& g : cores_) dims.push_back(g.dim(2));
  return dims;
}

std::vector<index_t> TTOperator::input_dims() const {
  std::vector<index_t> dims;
  for (const auto& g : cores_) dims.push_back(g.dim(3));
  return dims;
}

std::vector<index_t> TTOperator::ranks() const {
  std::vector<index_t> r{1};
  for (const auto& g : cores_) r.push_back(g.dim(4));
  return r;
}

TensorizationPlan TTOperator::plan() const {
  return TensorizationPlan(output_dims(), input_dims());
}

// -- Decomposition ----------------------------------------------------------------

namespace {

// Reorders a K x J matrix into the pair-grouped order-N tensor with mode n of
// size K_n * J_n, matching the (R_{n-1}, K_n, J_n, R_n) core layout.
DenseTensor pair_grouped_tensor(const DenseTensor& w, const TensorizationPlan& plan) {
  const index_t n = plan.order();
  std::vector<index_t> split_dims = plan.row_factors;
  split_dims.insert(split_dims.end(), plan.col_factors.begin(), plan.col_factors.end());
  DenseTensor split = reshape(w, Shape(split_dims));
  std::vector<index_t> perm;
  for (index_t k = 1; k <= n; ++k) {
    perm.push_back(k);
    perm.push_back(n + k);
  }
  DenseTensor interleaved = permute_modes(split, perm);
  std::vector<index_t> pair_dims;
  for (index_t k = 0; k < n; ++k) {
    pair_dims.push_back(plan.row_factors[static_cast<std::size_t>(k)] *
                        plan.col_factors[static_cast<std::size_t>(k)]);
  }
  return reshape(interleaved, Shape(pair_dims));
}

// Largest-magnitude entry of each left singular vector is made positive; the
// matching right singular vector is flipped with it.
void fix_svd_signs(RowMajorMatrix& u, RowMajorMatrix& v, index_t rank) {
  for (index_t c = 0; c < rank; ++c) {
    index_t arg = 0;
    double best = std::abs(u(0, c));
    for (index_t i = 1; i < u.rows(); ++i) {
      const double m = std::abs(u(i, c));
      if (m > best) {
        best = m;
        arg = i;
      }
    }
    if (u(arg, c) < 0.0) {
      u.col(c) = -u.col(c);
      v.col(c) = -v.col(c);
    }
  }
}

}  // namespace

TTDecomposition tt_from_matrix(const DenseTensor& w, const TensorizationPlan& plan,
                               const TTBudget& budget) {
  require(w.order() == 2, "tt_from_matrix: weight must be a matrix");
  require(w.dim(1) == plan.matrix_rows() && w.dim(2) == plan.matrix_cols(),
          "tt_from_matrix: matrix shape " + w.shape().to_string() +
              " does not match the tensorization plan");
  const index_t n_cores = plan.order();
  if (!budget.max_ranks.empty()) {
    require(static_cast<index_t>(budget.max_ranks.size()) == n_cores - 1,
            "tt_from_matrix: need one rank cap per interior bond");
    for (index_t r : budget.max_ranks) require(r >= 1, "tt_from_matrix: rank caps must be >= 1");
  }
  require(budget.epsilon >= 0.0, "tt_from_matrix: epsilon must be >= 0");

  const DenseTensor grouped = pair_grouped_tensor(w, plan);
  const index_t total = grouped.size();
  const double w_norm = frobenius_norm(w);
  const double delta =
      (budget.epsilon > 0.0 && n_cores > 1) ? budget.epsilon * w_norm / std::sqrt(n_cores - 1.0)
                                            : 0.0;

  std::vector<DenseTensor> cores;
  cores.reserve(static_cast<std::size_t>(n_cores));

  std::vector<double> buffer = grouped.values();
  index_t prev_rank = 1;
  index_t rest = total;
  for (index_t n = 0; n < n_cores - 1; ++n) {
    const index_t kn = plan.row_factors[static_cast<std::size_t>(n)];
    const index_t jn = plan.col_factors[static_cast<std::size_t>(n)];
    const index_t pair = kn * jn;
    const index_t rows = prev_rank * pair;
    rest /= pair;
    const index_t cols = rest;

    Eigen::Map<RowMajorMatrix> m(buffer.data(), rows, cols);
    Eigen::JacobiSVD<RowMajorMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    RowMajorMatrix u = svd.matrixU();
    RowMajorMatrix v = svd.matrixV();

    const index_t full = sigma.size();
    index_t rank = 0;
    if (sigma(0) > 0.0) {
      const double floor = sigma(0) * 1e-14;
      while (rank < full && sigma(rank) > floor) ++rank;
    }
    if (delta > 0.0) {
      double tail = 0.0;
      index_t r_eps = rank;
      for (index_t i = rank - 1; i >= 0; --i) {
        tail += sigma(i) * sigma(i);
        if (std::sqrt(tail) > delta) break;
        r_eps = i;
      }
      rank = r_eps;
    }
    if (!budget.max_ranks.empty()) {
      rank = std::min(rank, budget.max_ranks[static_cast<std::size_t>(n)]);
    }
    rank = std::max<index_t>(rank, 1);
    fix_svd_signs(u, v, rank);

    DenseTensor core(Shape{prev_rank, kn, jn, rank});
    for (index_t rp = 0; rp < prev_rank; ++rp)
      for (index_t d = 0; d < pair; ++d)
        for (index_t c = 0; c < rank; ++c)
          core[(rp * pair + d) * rank + c] = u(rp * pair + d, c);
    cores.push_back(std::move(core));

    // remainder = diag(sigma_1..r) * V^T, laid out row-major (rank x cols)
    std::vector<double> next(static_cast<std::size_t>(rank * cols));
    for (index_t c = 0; c < rank; ++c)
      for (index_t q = 0; q < cols; ++q)
        next[static_cast<std::size_t>(c * cols + q)] = sigma(c) * v(q, c);
    buffer = std::move(next);
    prev_rank = rank;
  }

  {
    const index_t kn = plan.row_factors.back();
    const index_t jn = plan.col_factors.back();
    require(rest == kn * jn, "tt_from_matrix: internal sweep size mismatch");
    cores.emplace_back(Shape{prev_rank, kn, jn, 1}, std::move(buffer));
  }

  TTDecomposition result{TTOperator(std::move(cores)), 0.0};
  result.frobenius_error = frobenius_norm(subtract(w, tt_reconstruct(result.op)));
  return result;
}

DenseTensor tt_reconstruct(const TTOperator& op) {
  const index_t n = op.core_count();
  DenseTensor acc = op.core(0);
  for (index_t k = 1; k < n; ++k) acc = contract(acc, acc.order(), op.core(k), 1);
  // acc modes: (R_0, K_1, J_1, ..., K_N, J_N, R_N) with unit boundary ranks
  std::vector<index_t> perm;
  for (index_t k = 0; k < n; ++k) perm.push_back(2 + 2 * k);
  for (index_t k = 0; k < n; ++k) perm.push_back(3 + 2 * k);
  perm.push_back(1);
  perm.push_back(2 + 2 * n);
  DenseTensor ordered = permute_modes(acc, perm);
  const TensorizationPlan plan = op.plan();
  return reshape(ordered, Shape{plan.matrix_rows(), plan.matrix_cols()});
}

DenseTensor tt_apply(const TTOperator& op, const DenseTensor& x,
                     std::vector<DenseTensor>* carries) {
  const std::vector<index_t> in_dims = op.input_dims();
  const index_t in_total = product(in_dims);
  DenseTensor current(Shape{1, 1, in_total});
  if (x.order() == 1) {
    require(x.size() == in_total, "tt_apply: vector length " + std::to_string(x.size()) +
                                      " does not match input dims");
    current.values() = x.values();
  } else {
    require(x.shape() == Shape(in_dims),
            "tt_apply: input shape " + x.shape().to_string() + " does not match operator");
    current.values() = x.values();
  }
  if (carries) {
    carries->clear();
    carries->push_back(current);
  }

  index_t k_prefix = 1;
  index_t j_rem = in_total;
  for (index_t n = 0; n < op.core_count(); ++n) {
    const DenseTensor& g = op.core(n);
    const index_t rp = g.dim(1), k = g.dim(2), j = g.dim(3), rn = g.dim(4);
    const index_t j_suffix = j_rem / j;
    DenseTensor next(Shape{k_prefix * k, rn, j_suffix});
    for (index_t kp = 0; kp < k_prefix; ++kp) {
      for (index_t kk = 0; kk < k; ++kk) {
        for (index_t rr = 0; rr < rn; ++rr) {
          for (index_t js = 0; js < j_suffix; ++js) {
            double acc = 0.0;
            for (index_t r = 0; r < rp; ++r) {
              const index_t in_base = (kp * rp + r) * (j * j_suffix) + js;
              const index_t g_base = (r * k + kk) * j;
              for (index_t jj = 0; jj < j; ++jj) {
                acc += g[(g_base + jj) * rn + rr] * current[in_base + jj * j_suffix];
              }
            }
            next[((kp * k + kk) * rn + rr) * j_suffix + js] = acc;
          }
        }
      }
    }
    current = std::move(next);
    if (carries) carries->push_back(current);
    k_prefix *= k;
    j_rem = j_suffix;
  }
  return reshape(current, Shape(op.output_dims()));
}

index_t tt_param_count(const TTOperator& op) {
  index_t count = 0;
  for (const auto& g : op.cores()) count += g.size();
  return count;
}

index_t tt_param_count(const TensorizationPlan& plan, const std::vector<index_t>& interior_ranks) {
  const index_t n = plan.order();
  require(static_cast<index_t>(interior_ranks.size()) == n - 1,
          "tt_param_count: need one rank per interior bond");
  index_t count = 0;
  index_t prev = 1;
  for (index_t k = 0; k < n; ++k) {
    const index_t next = (k == n - 1) ? 1 : interior_ranks[static_cast<std::size_t>(k)];
    require(next >= 1, "tt_param_count: ranks must be >= 1");
    count += prev * plan.row_factors[static_cast<std::size_t>(k)] *
             plan.col_factors[static_cast<std::size_t>(k)] * next;
    prev = next;
  }
  return count;
}

index_t dense_param_count(const TensorizationPlan& plan) {
  return plan.matrix_rows() * plan.matrix_cols();
}

DenseTensor convolution_tensor(index_t size, index_t kernel_size) {
  require(kernel_size >= 1 && size > kernel_size,
          "convolution_tensor: requires I > P >= 1");
  DenseTensor t(Shape{size, size, kernel_size});
  for (index_t i = 0; i < size; ++i) {
    for (index_t p = 0; p < kernel_size; ++p) {
      const index_t col = (i + p) % size;
      t[(i * size + col) * kernel_size + p] = 1.0;
    }
  }
  return t;
}

}  // namespace gtn
