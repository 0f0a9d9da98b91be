#pragma once

#include <optional>
#include <vector>

#include "gtn/tensor.hpp"

// Tensor-Train / Matrix-Product-Operator representation of large weight
// matrices: decomposition by a sequential SVD sweep, matrix-free application,
// reconstruction, and parameter accounting. Also hosts the sparse order-3
// convolution tensor that turns a kernel into a circulant matrix.

namespace gtn {

/// How a K x J matrix is reshaped into an order-2N operator tensor:
/// mode pair n couples the row factor K_n with the column factor J_n.
struct TensorizationPlan {
  std::vector<index_t> row_factors;  // K_1..K_N, prod = matrix rows
  std::vector<index_t> col_factors;  // J_1..J_N, prod = matrix cols

  TensorizationPlan() = default;
  TensorizationPlan(std::vector<index_t> rows, std::vector<index_t> cols);

  index_t order() const { return static_cast<index_t>(row_factors.size()); }
  index_t matrix_rows() const;
  index_t matrix_cols() const;
};

/// MPO weight: cores_[n] has shape R_n x K_{n+1} x J_{n+1} x R_{n+1}
/// with boundary ranks R_0 = R_N = 1.
class TTOperator {
 public:
  explicit TTOperator(std::vector<DenseTensor> cores);

  static TTOperator identity(const std::vector<index_t>& dims);

  index_t core_count() const { return static_cast<index_t>(cores_.size()); }
  const DenseTensor& core(index_t i) const { return cores_[static_cast<std::size_t>(i)]; }
  DenseTensor& core(index_t i) { return cores_[static_cast<std::size_t>(i)]; }
  const std::vector<DenseTensor>& cores() const { return cores_; }

  std::vector<index_t> output_dims() const;  // K_1..K_N
  std::vector<index_t> input_dims() const;   // J_1..J_N
  std::vector<index_t> ranks() const;        // R_0..R_N
  TensorizationPlan plan() const;

 private:
  std::vector<DenseTensor> cores_;
};

/// Rank budget for the decomposition sweep. `max_ranks` (if non-empty) caps
/// the N-1 interior bonds; `epsilon` is a relative Frobenius error budget
/// (0 keeps every numerically nonzero singular value).
struct TTBudget {
  std::vector<index_t> max_ranks;
  double epsilon = 0.0;

  static TTBudget ranks(std::vector<index_t> caps) { return TTBudget{std::move(caps), 0.0}; }
  static TTBudget error(double eps) { return TTBudget{{}, eps}; }
};

struct TTDecomposition {
  TTOperator op;
  double frobenius_error = 0.0;  // ||W - reconstruct(op)||_F, measured
};

/// Sequential-SVD decomposition of a matrix under the given plan.
/// Singular-vector signs are fixed (largest-magnitude entry positive) so the
/// result is reproducible.
TTDecomposition tt_from_matrix(const DenseTensor& w, const TensorizationPlan& plan,
                               const TTBudget& budget = {});

/// Contracts the core chain and reshapes back to the K x J matrix.
DenseTensor tt_reconstruct(const TTOperator& op);

/// Applies the operator to x (shape J_1..J_N, or an order-1 vector of length
/// prod J_n) core by core, without materializing the full matrix. Returns the
/// order-N result with shape K_1..K_N. When `carries` is non-null it receives
/// the N+1 intermediate sweep tensors (used by backpropagation).
DenseTensor tt_apply(const TTOperator& op, const DenseTensor& x,
                     std::vector<DenseTensor>* carries = nullptr);

/// sum_n R_{n-1} K_n J_n R_n
index_t tt_param_count(const TTOperator& op);
index_t tt_param_count(const TensorizationPlan& plan, const std::vector<index_t>& interior_ranks);
/// prod K_n * prod J_n
index_t dense_param_count(const TensorizationPlan& plan);

/// Sparse order-3 tensor T in R^{I x I x P} with t[i, (i+p) mod I, p] = 1
/// (0-based); contracting mode 3 with a kernel yields a circulant matrix.
DenseTensor convolution_tensor(index_t size, index_t kernel_size);

}  // namespace gtn
