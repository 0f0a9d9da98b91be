#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtn/tensor.hpp"

// Cross-checks between the classical forward passes and their graph tensor
// network reductions, evaluated on randomized instances. Each check runs the
// two routes through independent code paths and reports the worst
// disagreement.

namespace gtn {

struct EquivalenceReport {
  std::string name;
  index_t instances = 0;
  double max_abs_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

EquivalenceReport check_dnn_equivalence(std::uint64_t seed, index_t instances = 100);
EquivalenceReport check_gcn_equivalence(std::uint64_t seed, index_t instances = 100);
EquivalenceReport check_cnn_equivalence(std::uint64_t seed, index_t instances = 100);
EquivalenceReport check_attention_equivalence(std::uint64_t seed, index_t instances = 100);
/// Closed-form recurrence vs the unrolled recurrence over random
/// idempotent-projection recurrent weights.
EquivalenceReport check_rnn_equivalence(std::uint64_t seed, index_t instances = 50);
/// With the feature weight constrained to identity, the closed form collapses
/// to (I + S) Xt exactly.
EquivalenceReport check_rnn_gcn_reduction(std::uint64_t seed, index_t instances = 20);

/// All of the above with their standard tolerances.
std::vector<EquivalenceReport> run_equivalence_suite(std::uint64_t seed);

}  // namespace gtn
