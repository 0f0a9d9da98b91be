#include "gtn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gtn {

namespace detail {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

std::vector<index_t> strides_of(const Shape& shape) {
  const index_t order = shape.order();
  std::vector<index_t> strides(static_cast<std::size_t>(order), 1);
  for (index_t k = order - 2; k >= 0; --k) {
    strides[static_cast<std::size_t>(k)] =
        strides[static_cast<std::size_t>(k + 1)] * shape.dim(k + 2);
  }
  return strides;
}

namespace {

// Splits a shape around the 1-based mode n into (prefix, mode, suffix) extents.
struct ModeSplit {
  index_t pre = 1;
  index_t mid = 1;
  index_t post = 1;
};

ModeSplit split_at(const Shape& shape, index_t n) {
  ModeSplit s;
  for (index_t k = 1; k < n; ++k) s.pre *= shape.dim(k);
  s.mid = shape.dim(n);
  for (index_t k = n + 1; k <= shape.order(); ++k) s.post *= shape.dim(k);
  return s;
}

void require_mode(const DenseTensor& t, index_t n, const char* who) {
  require(n >= 1 && n <= t.order(),
          std::string(who) + ": mode " + std::to_string(n) + " out of range for order " +
              std::to_string(t.order()));
}

}  // namespace

}  // namespace detail

using detail::require;

// -- Shape --------------------------------------------------------------------

Shape::Shape(std::initializer_list<index_t> dims) : Shape(std::vector<index_t>(dims)) {}

Shape::Shape(std::vector<index_t> dims) : dims_(std::move(dims)) {
  for (index_t d : dims_) require(d >= 1, "Shape: all mode sizes must be >= 1");
}

index_t Shape::dim(index_t n) const {
  require(n >= 1 && n <= order(), "Shape::dim: mode index out of range");
  return dims_[static_cast<std::size_t>(n - 1)];
}

index_t Shape::element_count() const {
  index_t count = 1;
  for (index_t d : dims_) count *= d;
  return count;
}

std::string Shape::to_string() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) os << "x";
    os << dims_[i];
  }
  os << ")";
  return os.str();
}

// -- DenseTensor ----------------------------------------------------------------

DenseTensor::DenseTensor() : shape_{}, values_(1, 0.0) {}

DenseTensor::DenseTensor(Shape shape, double fill)
    : shape_(std::move(shape)),
      values_(static_cast<std::size_t>(shape_.element_count()), fill) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  require(static_cast<index_t>(values_.size()) == shape_.element_count(),
          "DenseTensor: value count does not match shape " + shape_.to_string());
}

DenseTensor DenseTensor::scalar(double value) {
  DenseTensor t;
  t.values_[0] = value;
  return t;
}

DenseTensor DenseTensor::identity(index_t n) {
  require(n >= 1, "identity: size must be >= 1");
  DenseTensor t(Shape{n, n});
  for (index_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
  return t;
}

DenseTensor DenseTensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const index_t r = static_cast<index_t>(rows.size());
  require(r >= 1, "matrix: needs at least one row");
  const index_t c = static_cast<index_t>(rows.begin()->size());
  DenseTensor t(Shape{r, c});
  index_t flat = 0;
  for (const auto& row : rows) {
    require(static_cast<index_t>(row.size()) == c, "matrix: ragged rows");
    for (double v : row) t[flat++] = v;
  }
  return t;
}

namespace {
index_t flat_index(const Shape& shape, std::span<const index_t> index) {
  require(static_cast<index_t>(index.size()) == shape.order(),
          "at: multi-index order mismatch");
  index_t flat = 0;
  for (index_t k = 0; k < shape.order(); ++k) {
    const index_t i = index[static_cast<std::size_t>(k)];
    require(i >= 0 && i < shape.dim(k + 1), "at: index out of range");
    flat = flat * shape.dim(k + 1) + i;
  }
  return flat;
}
}  // namespace

double DenseTensor::at(std::span<const index_t> index) const {
  return values_[static_cast<std::size_t>(flat_index(shape_, index))];
}

double& DenseTensor::at(std::span<const index_t> index) {
  return values_[static_cast<std::size_t>(flat_index(shape_, index))];
}

double DenseTensor::at(std::initializer_list<index_t> index) const {
  std::vector<index_t> idx(index);
  return values_[static_cast<std::size_t>(flat_index(shape_, idx))];
}

double& DenseTensor::at(std::initializer_list<index_t> index) {
  std::vector<index_t> idx(index);
  return values_[static_cast<std::size_t>(flat_index(shape_, idx))];
}

// -- Reshaping ---------------------------------------------------------------

DenseTensor vectorize(const DenseTensor& t) {
  return DenseTensor(Shape{t.size()}, t.values());
}

DenseTensor tensorize(const DenseTensor& v, const Shape& shape) {
  require(v.size() == shape.element_count(),
          "tensorize: element count mismatch for shape " + shape.to_string());
  return DenseTensor(shape, v.values());
}

DenseTensor reshape(const DenseTensor& t, const Shape& shape) {
  require(t.size() == shape.element_count(),
          "reshape: element count mismatch for shape " + shape.to_string());
  return DenseTensor(shape, t.values());
}

DenseTensor matricize(const DenseTensor& t, index_t n) {
  detail::require_mode(t, n, "matricize");
  const auto s = detail::split_at(t.shape(), n);
  DenseTensor out(Shape{s.mid, s.pre * s.post});
  // (pre, mid, post) -> (mid, pre, post)
  for (index_t p = 0; p < s.pre; ++p) {
    for (index_t i = 0; i < s.mid; ++i) {
      const index_t src = (p * s.mid + i) * s.post;
      const index_t dst = (i * s.pre + p) * s.post;
      std::copy_n(t.data() + src, s.post, out.data() + dst);
    }
  }
  return out;
}

DenseTensor dematricize(const DenseTensor& m, index_t n, const Shape& shape) {
  require(m.order() == 2, "dematricize: input must be order-2");
  require(n >= 1 && n <= shape.order(), "dematricize: mode out of range");
  const auto s = detail::split_at(shape, n);
  require(m.dim(1) == s.mid && m.dim(2) == s.pre * s.post,
          "dematricize: unfolding does not match shape " + shape.to_string());
  DenseTensor out(shape);
  for (index_t p = 0; p < s.pre; ++p) {
    for (index_t i = 0; i < s.mid; ++i) {
      const index_t src = (i * s.pre + p) * s.post;
      const index_t dst = (p * s.mid + i) * s.post;
      std::copy_n(m.data() + src, s.post, out.data() + dst);
    }
  }
  return out;
}

DenseTensor permute_modes(const DenseTensor& t, const std::vector<index_t>& perm) {
  const index_t order = t.order();
  require(static_cast<index_t>(perm.size()) == order, "permute_modes: perm order mismatch");
  std::vector<bool> seen(static_cast<std::size_t>(order), false);
  std::vector<index_t> out_dims(static_cast<std::size_t>(order));
  for (index_t k = 0; k < order; ++k) {
    const index_t src = perm[static_cast<std::size_t>(k)];
    require(src >= 1 && src <= order, "permute_modes: mode out of range");
    require(!seen[static_cast<std::size_t>(src - 1)], "permute_modes: duplicate mode");
    seen[static_cast<std::size_t>(src - 1)] = true;
    out_dims[static_cast<std::size_t>(k)] = t.dim(src);
  }
  DenseTensor out((Shape(out_dims)));
  if (order == 0) {
    out[0] = t[0];
    return out;
  }
  const auto in_strides = detail::strides_of(t.shape());
  std::vector<index_t> idx(static_cast<std::size_t>(order), 0);
  const index_t total = t.size();
  for (index_t flat = 0; flat < total; ++flat) {
    // flat runs over the OUTPUT in row-major order; map back to the source.
    index_t src_off = 0;
    for (index_t k = 0; k < order; ++k) {
      src_off += idx[static_cast<std::size_t>(k)] *
                 in_strides[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)] - 1)];
    }
    out[flat] = t[src_off];
    for (index_t k = order - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] < out_dims[static_cast<std::size_t>(k)]) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return out;
}

// -- Products and contractions -----------------------------------------------

DenseTensor kronecker(const DenseTensor& a, const DenseTensor& b) {
  require(a.order() == 2 && b.order() == 2, "kronecker: both operands must be order-2");
  const index_t i1 = a.dim(1), i2 = a.dim(2);
  const index_t j1 = b.dim(1), j2 = b.dim(2);
  DenseTensor out(Shape{i1 * j1, i2 * j2});
  const index_t out_cols = i2 * j2;
  for (index_t i = 0; i < i1; ++i) {
    for (index_t k = 0; k < i2; ++k) {
      const double aik = a[i * i2 + k];
      for (index_t j = 0; j < j1; ++j) {
        const index_t row = i * j1 + j;
        for (index_t l = 0; l < j2; ++l) {
          out[row * out_cols + (k * j2 + l)] = aik * b[j * j2 + l];
        }
      }
    }
  }
  return out;
}

DenseTensor contract(const DenseTensor& a, index_t n, const DenseTensor& b, index_t m) {
  detail::require_mode(a, n, "contract");
  detail::require_mode(b, m, "contract");
  require(a.dim(n) == b.dim(m),
          "contract: mode sizes differ (" + std::to_string(a.dim(n)) + " vs " +
              std::to_string(b.dim(m)) + ")");
  const auto sa = detail::split_at(a.shape(), n);
  const auto sb = detail::split_at(b.shape(), m);
  const index_t k_size = sa.mid;

  std::vector<index_t> out_dims;
  for (index_t k = 1; k <= a.order(); ++k)
    if (k != n) out_dims.push_back(a.dim(k));
  for (index_t k = 1; k <= b.order(); ++k)
    if (k != m) out_dims.push_back(b.dim(k));
  DenseTensor out((Shape(out_dims)));

  // a viewed as (pre_a, k, post_a), b as (pre_b, k, post_b);
  // out[(pa,qa),(pb,qb)] = sum_k a[pa,k,qa] * b[pb,k,qb]
  index_t dst = 0;
  for (index_t pa = 0; pa < sa.pre; ++pa) {
    for (index_t qa = 0; qa < sa.post; ++qa) {
      for (index_t pb = 0; pb < sb.pre; ++pb) {
        for (index_t qb = 0; qb < sb.post; ++qb) {
          double acc = 0.0;
          for (index_t k = 0; k < k_size; ++k) {
            acc += a[(pa * k_size + k) * sa.post + qa] * b[(pb * k_size + k) * sb.post + qb];
          }
          out[dst++] = acc;
        }
      }
    }
  }
  return out;
}

DenseTensor mode_n_product(const DenseTensor& a, index_t n, const DenseTensor& b) {
  detail::require_mode(a, n, "mode_n_product");
  require(b.order() == 2, "mode_n_product: factor must be a matrix");
  const auto s = detail::split_at(a.shape(), n);
  require(b.dim(2) == s.mid, "mode_n_product: factor columns (" + std::to_string(b.dim(2)) +
                                 ") must match mode size " + std::to_string(s.mid));
  const index_t j_size = b.dim(1);
  std::vector<index_t> out_dims = a.shape().dims();
  out_dims[static_cast<std::size_t>(n - 1)] = j_size;
  DenseTensor out((Shape(out_dims)));
  for (index_t p = 0; p < s.pre; ++p) {
    for (index_t j = 0; j < j_size; ++j) {
      for (index_t q = 0; q < s.post; ++q) {
        double acc = 0.0;
        for (index_t i = 0; i < s.mid; ++i) {
          acc += b[j * s.mid + i] * a[(p * s.mid + i) * s.post + q];
        }
        out[(p * j_size + j) * s.post + q] = acc;
      }
    }
  }
  return out;
}

DenseTensor tucker_product(const DenseTensor& a, const std::vector<ModeFactor>& factors) {
  std::vector<bool> used(static_cast<std::size_t>(a.order()), false);
  for (const auto& f : factors) {
    require(f.mode >= 1 && f.mode <= a.order(), "tucker_product: mode out of range");
    require(!used[static_cast<std::size_t>(f.mode - 1)], "tucker_product: duplicate mode");
    used[static_cast<std::size_t>(f.mode - 1)] = true;
  }
  DenseTensor out = a;
  for (const auto& f : factors) out = mode_n_product(out, f.mode, f.matrix);
  return out;
}

// -- Dense linear algebra helpers ---------------------------------------------

DenseTensor matmul(const DenseTensor& a, const DenseTensor& b) {
  require(a.order() == 2 && b.order() == 2, "matmul: operands must be order-2");
  require(a.dim(2) == b.dim(1), "matmul: inner dimensions differ");
  const index_t rows = a.dim(1), inner = a.dim(2), cols = b.dim(2);
  DenseTensor out(Shape{rows, cols});
  for (index_t i = 0; i < rows; ++i) {
    for (index_t j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (index_t k = 0; k < inner; ++k) acc += a[i * inner + k] * b[k * cols + j];
      out[i * cols + j] = acc;
    }
  }
  return out;
}

DenseTensor transpose(const DenseTensor& a) {
  require(a.order() == 2, "transpose: operand must be order-2");
  const index_t rows = a.dim(1), cols = a.dim(2);
  DenseTensor out(Shape{cols, rows});
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j) out[j * rows + i] = a[i * cols + j];
  return out;
}

// -- Elementwise utilities -----------------------------------------------------

DenseTensor add(const DenseTensor& a, const DenseTensor& b) {
  require(a.same_shape(b), "add: shape mismatch");
  DenseTensor out = a;
  for (index_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

DenseTensor subtract(const DenseTensor& a, const DenseTensor& b) {
  require(a.same_shape(b), "subtract: shape mismatch");
  DenseTensor out = a;
  for (index_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

DenseTensor scale(const DenseTensor& a, double c) {
  DenseTensor out = a;
  for (index_t i = 0; i < out.size(); ++i) out[i] *= c;
  return out;
}

double max_abs(const DenseTensor& a) {
  double m = 0.0;
  for (index_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  require(a.same_shape(b), "max_abs_diff: shape mismatch");
  double m = 0.0;
  for (index_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double frobenius_norm(const DenseTensor& a) {
  double acc = 0.0;
  for (index_t i = 0; i < a.size(); ++i) acc += a[i] * a[i];
  return std::sqrt(acc);
}

bool all_finite(const DenseTensor& a) {
  for (index_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

}  // namespace gtn
