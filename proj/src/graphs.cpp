#include "gtn/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gtn/tt.hpp"

namespace gtn {

using detail::require;

std::string to_string(GsoKind kind) {
  switch (kind) {
    case GsoKind::adjacency: return "adjacency";
    case GsoKind::gcn_normalized: return "gcn_normalized";
    case GsoKind::circulant: return "circulant";
    case GsoKind::time_decay: return "time_decay";
    case GsoKind::attention: return "attention";
    case GsoKind::inferred: return "inferred";
    case GsoKind::custom: return "custom";
  }
  return "custom";
}

GraphShiftOperator gso_custom(DenseTensor matrix, GsoKind kind) {
  require(matrix.order() == 2 && matrix.dim(1) == matrix.dim(2),
          "gso_custom: matrix must be square");
  require(all_finite(matrix), "gso_custom: matrix entries must be finite");
  return GraphShiftOperator{std::move(matrix), kind};
}

GraphShiftOperator gso_identity(index_t size) {
  return GraphShiftOperator{DenseTensor::identity(size), GsoKind::custom};
}

GraphShiftOperator gso_gcn(const DenseTensor& adjacency) {
  require(adjacency.order() == 2 && adjacency.dim(1) == adjacency.dim(2),
          "gso_gcn: adjacency must be square");
  const index_t n = adjacency.dim(1);
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j < n; ++j) {
      const double v = adjacency[i * n + j];
      require(v >= 0.0, "gso_gcn: adjacency entries must be non-negative");
      require(v == adjacency[j * n + i], "gso_gcn: adjacency must be symmetric");
    }
    require(adjacency[i * n + i] == 0.0, "gso_gcn: adjacency diagonal must be zero");
  }
  // self-loops guarantee degree >= 1, so the inverse square roots exist
  std::vector<double> inv_sqrt_degree(static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    double degree = 1.0;
    for (index_t j = 0; j < n; ++j) degree += adjacency[i * n + j];
    inv_sqrt_degree[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(degree);
  }
  // fill the upper triangle and mirror so the result is exactly symmetric
  DenseTensor s(Shape{n, n});
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i; j < n; ++j) {
      const double a = adjacency[i * n + j] + (i == j ? 1.0 : 0.0);
      const double v = inv_sqrt_degree[static_cast<std::size_t>(i)] * a *
                       inv_sqrt_degree[static_cast<std::size_t>(j)];
      s[i * n + j] = v;
      s[j * n + i] = v;
    }
  }
  return GraphShiftOperator{std::move(s), GsoKind::gcn_normalized};
}

GraphShiftOperator gso_circulant(const DenseTensor& kernel, index_t size) {
  require(kernel.order() == 1, "gso_circulant: kernel must be order-1");
  const DenseTensor c = convolution_tensor(size, kernel.size());
  DenseTensor s = contract(c, 3, kernel, 1);
  return GraphShiftOperator{std::move(s), GsoKind::circulant};
}

GraphShiftOperator gso_time_decay(index_t size, double decay) {
  require(size >= 1, "gso_time_decay: size must be >= 1");
  require(decay > 0.0 && decay <= 1.0, "gso_time_decay: decay must lie in (0, 1]");
  DenseTensor s(Shape{size, size});
  for (index_t i = 1; i < size; ++i) {
    double w = decay;
    for (index_t j = i - 1; j >= 0; --j) {
      s[i * size + j] = w;
      w *= decay;
    }
  }
  return GraphShiftOperator{std::move(s), GsoKind::time_decay};
}

GraphShiftOperator gso_attention(const DenseTensor& x, const DenseTensor& wq,
                                 const DenseTensor& wk, double dk) {
  require(x.order() == 2, "gso_attention: X must be order-2");
  require(wq.order() == 2 && wk.order() == 2, "gso_attention: weights must be order-2");
  require(wq.dim(1) == x.dim(2) && wk.dim(1) == x.dim(2),
          "gso_attention: weight rows must match feature size");
  require(wq.dim(2) == wk.dim(2), "gso_attention: query/key widths differ");
  require(dk > 0.0, "gso_attention: dk must be positive");
  const DenseTensor q = matmul(x, wq);
  const DenseTensor k = matmul(x, wk);
  DenseTensor scores = matmul(q, transpose(k));
  const double inv_scale = 1.0 / std::sqrt(dk);
  const index_t n = scores.dim(1);
  // row-wise softmax with max subtraction
  for (index_t i = 0; i < n; ++i) {
    double row_max = scores[i * n];
    for (index_t j = 1; j < n; ++j) row_max = std::max(row_max, scores[i * n + j]);
    double total = 0.0;
    for (index_t j = 0; j < n; ++j) {
      const double e = std::exp((scores[i * n + j] - row_max) * inv_scale);
      scores[i * n + j] = e;
      total += e;
    }
    for (index_t j = 0; j < n; ++j) scores[i * n + j] /= total;
  }
  return GraphShiftOperator{std::move(scores), GsoKind::attention};
}

SimilarityFunction gaussian_similarity(double sigma) {
  require(sigma > 0.0, "gaussian_similarity: sigma must be positive");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  return [inv](std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      d2 += d * d;
    }
    return std::exp(-d2 * inv);
  };
}

SimilarityFunction cosine_similarity_clamped() {
  return [](std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      dot += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::max(0.0, dot / std::sqrt(na * nb));
  };
}

SparsifyRule SparsifyRule::top_k(index_t k) {
  require(k >= 1, "SparsifyRule: k must be >= 1");
  SparsifyRule r;
  r.kind = Kind::top_k;
  r.k = k;
  return r;
}

SparsifyRule SparsifyRule::cutoff(double threshold) {
  require(threshold >= 0.0, "SparsifyRule: threshold must be >= 0");
  SparsifyRule r;
  r.kind = Kind::threshold;
  r.threshold = threshold;
  return r;
}

GraphShiftOperator gso_infer(const std::vector<std::vector<double>>& features,
                             const SimilarityFunction& f, const SparsifyRule& rule) {
  require(!features.empty(), "gso_infer: feature set must not be empty");
  const index_t n = static_cast<index_t>(features.size());
  const std::size_t width = features.front().size();
  for (const auto& v : features)
    require(v.size() == width, "gso_infer: feature vectors must have equal length");

  DenseTensor sim(Shape{n, n});
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = i + 1; j < n; ++j) {
      const double w = f(features[static_cast<std::size_t>(i)],
                         features[static_cast<std::size_t>(j)]);
      sim[i * n + j] = w;
      sim[j * n + i] = w;
    }
  }

  DenseTensor s(Shape{n, n});
  if (rule.kind == SparsifyRule::Kind::threshold) {
    for (index_t i = 0; i < n; ++i)
      for (index_t j = 0; j < n; ++j)
        if (i != j && sim[i * n + j] >= rule.threshold) s[i * n + j] = sim[i * n + j];
  } else {
    // keep the k strongest neighbours per row, then symmetrize by max
    std::vector<index_t> order(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) {
      std::iota(order.begin(), order.end(), index_t{0});
      std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
        return sim[i * n + a] > sim[i * n + b];
      });
      index_t kept = 0;
      for (index_t j : order) {
        if (j == i) continue;
        if (kept == rule.k) break;
        s[i * n + j] = sim[i * n + j];
        ++kept;
      }
    }
    for (index_t i = 0; i < n; ++i) {
      for (index_t j = i + 1; j < n; ++j) {
        const double m = std::max(s[i * n + j], s[j * n + i]);
        s[i * n + j] = m;
        s[j * n + i] = m;
      }
    }
  }
  return GraphShiftOperator{std::move(s), GsoKind::inferred};
}

DenseTensor graph_shift(const GraphShiftOperator& s, const DenseTensor& x) {
  require(x.order() >= 1, "graph_shift: signal must have at least one mode");
  return mode_n_product(x, 1, s.matrix);
}

}  // namespace gtn
