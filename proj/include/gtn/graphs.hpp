#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gtn/tensor.hpp"

// Graph Shift Operator construction: normalized adjacency (GCN), circulant
// graphs from convolution kernels, directed time-decay graphs, input-dependent
// attention graphs, and similarity-based graph inference.

namespace gtn {

enum class GsoKind {
  adjacency,
  gcn_normalized,
  circulant,
  time_decay,
  attention,
  inferred,
  custom,
};

std::string to_string(GsoKind kind);

/// Square matrix over one domain mode, tagged with its construction recipe.
struct GraphShiftOperator {
  DenseTensor matrix;
  GsoKind kind = GsoKind::custom;

  index_t size() const { return matrix.order() == 2 ? matrix.dim(1) : 0; }
};

/// Wraps an arbitrary square matrix (validated) as a GSO.
GraphShiftOperator gso_custom(DenseTensor matrix, GsoKind kind = GsoKind::custom);

/// Identity GSO of the given size (a domain mode left unshifted).
GraphShiftOperator gso_identity(index_t size);

/// Symmetrically normalized adjacency with self-loops:
/// S = D^{-1/2} (I + A) D^{-1/2}. A must be square, symmetric, non-negative
/// and hollow (zero diagonal).
GraphShiftOperator gso_gcn(const DenseTensor& adjacency);

/// Circulant adjacency generated from a length-P kernel; S x equals the
/// circular convolution of x with the kernel.
GraphShiftOperator gso_circulant(const DenseTensor& kernel, index_t size);

/// Strictly lower-triangular causal operator with entries c^(i1-i2) for
/// i1 > i2 and zero otherwise; c must lie in (0, 1].
GraphShiftOperator gso_time_decay(index_t size, double decay);

/// Input-dependent attention graph: row-wise softmax of (X Wq)(X Wk)^T / sqrt(dk).
GraphShiftOperator gso_attention(const DenseTensor& x, const DenseTensor& wq,
                                 const DenseTensor& wk, double dk);

/// Symmetric pairwise similarity; built-ins below satisfy f(a,b) = f(b,a).
using SimilarityFunction =
    std::function<double(std::span<const double>, std::span<const double>)>;

SimilarityFunction gaussian_similarity(double sigma);
SimilarityFunction cosine_similarity_clamped();

struct SparsifyRule {
  enum class Kind { top_k, threshold };
  Kind kind = Kind::top_k;
  index_t k = 4;
  double threshold = 0.0;

  static SparsifyRule top_k(index_t k);
  static SparsifyRule cutoff(double threshold);
};

/// Infers a graph from vertex features: edge weights f(x_i, x_j), zero
/// diagonal, sparsified by the rule (top-k results are symmetrized by
/// max(S, S^T)).
GraphShiftOperator gso_infer(const std::vector<std::vector<double>>& features,
                             const SimilarityFunction& f,
                             const SparsifyRule& rule = {});

/// Neighbourhood aggregation Y = S X; coincides with the mode-1 product.
DenseTensor graph_shift(const GraphShiftOperator& s, const DenseTensor& x);

}  // namespace gtn
