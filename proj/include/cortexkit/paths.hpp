#pragma once

#include <limits>

#include "cortexkit/matrix.hpp"

namespace cortexkit {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct ShortestPaths {
  Matrix dist;         // kUnreachable for disconnected pairs, 0 on the diagonal
  Matrix path_counts;  // number of distinct shortest h->j paths
};

/// All-pairs shortest paths over the nonzero entries of adj (adj(i,j) is an
/// arc i->j). Unweighted mode uses hop counts (BFS); weighted mode uses
/// length 1/w (Dijkstra). Throws ValueError on negative or non-finite entries.
ShortestPaths shortest_paths(const Matrix& adj, bool weighted);

}  // namespace cortexkit
