#include "cortexkit/graph.hpp"

#include <cmath>

#include "cortexkit/errors.hpp"

namespace cortexkit {

BrainGraph::BrainGraph(Matrix adjacency, bool weighted, std::optional<Matrix> node_features,
                       std::vector<std::string> labels, double symmetry_tol)
    : adjacency_(std::move(adjacency)),
      weighted_(weighted),
      node_features_(std::move(node_features)),
      labels_(std::move(labels)) {
  const std::size_t n = adjacency_.rows();
  if (!adjacency_.is_square()) throw ValidationError("adjacency is not square");
  if (n < 2) throw ValidationError("graph needs at least 2 nodes");
  if (!adjacency_.all_finite()) throw ValidationError("adjacency has non-finite entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency_(i, i) != 0.0) throw ValidationError("diagonal entry " + std::to_string(i) + " is not zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(adjacency_(i, j) - adjacency_(j, i)) > symmetry_tol) {
        throw ValidationError("adjacency is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  if (!weighted_) {
    for (double v : adjacency_.data()) {
      if (v != 0.0 && v != 1.0) throw ValidationError("unweighted graph has a non-binary entry");
    }
  }
  if (node_features_ && node_features_->rows() != n) {
    throw ValidationError("node feature rows do not match node count");
  }
  if (!labels_.empty() && labels_.size() != n) throw ValidationError("label count does not match node count");
}

std::size_t BrainGraph::edge_count() const {
  std::size_t l = 0;
  for (std::size_t i = 0; i < n_nodes(); ++i)
    for (std::size_t j = i + 1; j < n_nodes(); ++j) l += adjacency_(i, j) != 0.0 ? 1 : 0;
  return l;
}

Matrix BrainGraph::support() const {
  Matrix s(n_nodes(), n_nodes());
  for (std::size_t i = 0; i < n_nodes(); ++i)
    for (std::size_t j = 0; j < n_nodes(); ++j) s(i, j) = has_edge(i, j) ? 1.0 : 0.0;
  return s;
}

BrainGraph BrainGraph::induced(const std::vector<std::size_t>& keep) const {
  const std::size_t m = keep.size();
  Matrix a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = adjacency_(keep[i], keep[j]);
  std::optional<Matrix> h;
  if (node_features_) {
    Matrix f(m, node_features_->cols());
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t d = 0; d < f.cols(); ++d) f(i, d) = (*node_features_)(keep[i], d);
    h = std::move(f);
  }
  std::vector<std::string> labels;
  if (!labels_.empty())
    for (std::size_t k : keep) labels.push_back(labels_[k]);
  return BrainGraph(std::move(a), weighted_, std::move(h), std::move(labels));
}

}  // namespace cortexkit
