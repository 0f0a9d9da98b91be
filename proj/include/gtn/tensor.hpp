#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

// Dense order-N tensor type and the multilinear algebra the rest of the
// library is built on: vectorization, matricization, Kronecker products,
// (n,m)-contractions, mode-n products and Tucker products.
//
// Linearization contract: values are stored row-major, i.e. the LAST mode
// varies fastest. vectorize/tensorize and matricize/dematricize are exact
// (bit-identical) round trips under this convention, and the vectorized
// Tucker identity vec([[A; B1..BN]]) = (B1 (x) ... (x) BN) vec(A) holds
// as written.
//
// Mode arguments in the public API are 1-based (mode 1 is the first mode);
// element offsets and multi-indices are 0-based.

namespace gtn {

using index_t = std::int64_t;

/// Mode sizes I_1..I_N of an order-N tensor. Order 0 denotes a scalar.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<index_t> dims);
  explicit Shape(std::vector<index_t> dims);

  index_t order() const { return static_cast<index_t>(dims_.size()); }
  /// Size of the 1-based mode `n`.
  index_t dim(index_t n) const;
  const std::vector<index_t>& dims() const { return dims_; }
  /// Total number of elements (1 for order-0).
  index_t element_count() const;

  bool operator==(const Shape& other) const { return dims_ == other.dims_; }
  bool operator!=(const Shape& other) const { return !(*this == other); }

  std::string to_string() const;

 private:
  std::vector<index_t> dims_;
};

class DenseTensor {
 public:
  /// Order-0 zero scalar.
  DenseTensor();
  explicit DenseTensor(Shape shape, double fill = 0.0);
  DenseTensor(Shape shape, std::vector<double> values);

  static DenseTensor scalar(double value);
  static DenseTensor identity(index_t n);
  /// Row-major matrix literal, convenient in tests and examples.
  static DenseTensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  const Shape& shape() const { return shape_; }
  index_t order() const { return shape_.order(); }
  index_t size() const { return static_cast<index_t>(values_.size()); }
  index_t dim(index_t n) const { return shape_.dim(n); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double operator[](index_t flat) const { return values_[static_cast<std::size_t>(flat)]; }
  double& operator[](index_t flat) { return values_[static_cast<std::size_t>(flat)]; }

  /// Element access by 0-based multi-index.
  double at(std::span<const index_t> index) const;
  double& at(std::span<const index_t> index);
  double at(std::initializer_list<index_t> index) const;
  double& at(std::initializer_list<index_t> index);

  bool same_shape(const DenseTensor& other) const { return shape_ == other.shape_; }

 private:
  Shape shape_;
  std::vector<double> values_;
};

// -- Reshaping ---------------------------------------------------------------

/// Flatten to an order-1 tensor of length prod(I_n), last mode fastest.
DenseTensor vectorize(const DenseTensor& t);
/// Inverse of vectorize; `shape` must match the element count.
DenseTensor tensorize(const DenseTensor& v, const Shape& shape);
/// Unfold along the 1-based mode `n` into an I_n x (prod of the rest) matrix.
/// Columns enumerate the remaining modes in their original order, last fastest.
DenseTensor matricize(const DenseTensor& t, index_t n);
/// Inverse of matricize: folds an unfolding back into `shape`.
DenseTensor dematricize(const DenseTensor& m, index_t n, const Shape& shape);
/// Reorder modes; perm[k] gives the 1-based source mode of output mode k+1.
DenseTensor permute_modes(const DenseTensor& t, const std::vector<index_t>& perm);
/// Reinterpret the buffer under a new shape with equal element count.
DenseTensor reshape(const DenseTensor& t, const Shape& shape);

// -- Products and contractions -----------------------------------------------

/// Left Kronecker product of two matrices: block (i,j) equals a_{ij} * B.
DenseTensor kronecker(const DenseTensor& a, const DenseTensor& b);
/// (n,m)-contraction: sums over mode n of `a` against mode m of `b`.
/// Output modes are a's modes without n followed by b's modes without m.
DenseTensor contract(const DenseTensor& a, index_t n, const DenseTensor& b, index_t m);
/// Mode-n product with a J x I_n matrix; replaces mode n by J.
DenseTensor mode_n_product(const DenseTensor& a, index_t n, const DenseTensor& b);

struct ModeFactor {
  index_t mode = 0;  // 1-based
  DenseTensor matrix;
};

/// Tucker product: sequential mode-n products, at most one factor per mode.
DenseTensor tucker_product(const DenseTensor& a, const std::vector<ModeFactor>& factors);

// -- Dense linear algebra helpers ---------------------------------------------

DenseTensor matmul(const DenseTensor& a, const DenseTensor& b);
DenseTensor transpose(const DenseTensor& a);

// -- Elementwise utilities -----------------------------------------------------

DenseTensor add(const DenseTensor& a, const DenseTensor& b);
DenseTensor subtract(const DenseTensor& a, const DenseTensor& b);
DenseTensor scale(const DenseTensor& a, double c);
double max_abs(const DenseTensor& a);
double max_abs_diff(const DenseTensor& a, const DenseTensor& b);
double frobenius_norm(const DenseTensor& a);
bool all_finite(const DenseTensor& a);

namespace detail {
/// Throws std::invalid_argument when `cond` is false.
void require(bool cond, const std::string& message);
/// Row-major strides for a shape (last mode has stride 1).
std::vector<index_t> strides_of(const Shape& shape);
}  // namespace detail

}  // namespace gtn
