#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cortexkit/matrix.hpp"

namespace cortexkit {

/// Undirected functional-connectivity graph: symmetric N x N adjacency with
/// zero diagonal, optional N x D node features and optional node labels.
class BrainGraph {
 public:
  // Validates the invariants: N >= 2, square, finite, symmetric within
  // `symmetry_tol`, zero diagonal, entries in {0,1} when unweighted.
  // Violations throw ValidationError.
  BrainGraph(Matrix adjacency, bool weighted, std::optional<Matrix> node_features = std::nullopt,
             std::vector<std::string> labels = {}, double symmetry_tol = 1e-12);

  std::size_t n_nodes() const noexcept { return adjacency_.rows(); }
  const Matrix& adjacency() const noexcept { return adjacency_; }
  bool weighted() const noexcept { return weighted_; }
  const std::optional<Matrix>& node_features() const noexcept { return node_features_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  bool has_edge(std::size_t i, std::size_t j) const { return i != j && adjacency_(i, j) != 0.0; }
  std::size_t edge_count() const;

  // Binary support of the adjacency (1 where an edge exists).
  Matrix support() const;

  // Induced subgraph over `keep` (in the given order); features and labels follow.
  BrainGraph induced(const std::vector<std::size_t>& keep) const;

  friend bool operator==(const BrainGraph&, const BrainGraph&) = default;

 private:
  Matrix adjacency_;
  bool weighted_;
  std::optional<Matrix> node_features_;
  std::vector<std::string> labels_;
};

}  // namespace cortexkit
