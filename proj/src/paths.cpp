#include "cortexkit/paths.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "cortexkit/errors.hpp"

namespace cortexkit {

namespace {

// Relative tolerance for treating two weighted path lengths as equal.
constexpr double kTieTol = 1e-12;

void bfs_from(const Matrix& adj, std::size_t src, ShortestPaths& out) {
  const std::size_t n = adj.rows();
  std::queue<std::size_t> q;
  out.dist(src, src) = 0.0;
  out.path_counts(src, src) = 1.0;
  q.push(src);
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u || adj(u, v) == 0.0) continue;
      if (out.dist(src, v) == kUnreachable) {
        out.dist(src, v) = out.dist(src, u) + 1.0;
        q.push(v);
      }
      if (out.dist(src, v) == out.dist(src, u) + 1.0) out.path_counts(src, v) += out.path_counts(src, u);
    }
  }
}

void dijkstra_from(const Matrix& adj, std::size_t src, ShortestPaths& out) {
  const std::size_t n = adj.rows();
  std::vector<bool> done(n, false);
  out.dist(src, src) = 0.0;
  out.path_counts(src, src) = 1.0;
  // Dense O(n^2) Dijkstra; graphs here are small and dense.
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t u = n;
    double best = kUnreachable;
    for (std::size_t v = 0; v < n; ++v) {
      if (!done[v] && out.dist(src, v) < best) {
        best = out.dist(src, v);
        u = v;
      }
    }
    if (u == n) break;
    done[u] = true;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u || done[v] || adj(u, v) == 0.0) continue;
      const double cand = out.dist(src, u) + 1.0 / adj(u, v);
      const double cur = out.dist(src, v);
      if (cur != kUnreachable && std::abs(cand - cur) <= kTieTol * std::max(cand, cur)) {
        out.path_counts(src, v) += out.path_counts(src, u);
      } else if (cand < cur) {
        out.dist(src, v) = cand;
        out.path_counts(src, v) = out.path_counts(src, u);
      }
    }
  }
}

}  // namespace

ShortestPaths shortest_paths(const Matrix& adj, bool weighted) {
  if (!adj.is_square()) throw DimensionError("shortest_paths: adjacency is not square");
  for (double w : adj.data()) {
    if (!std::isfinite(w) || w < 0.0) throw ValueError("shortest_paths: negative or non-finite entry");
  }
  const std::size_t n = adj.rows();
  ShortestPaths out{Matrix(n, n, kUnreachable), Matrix(n, n, 0.0)};
  for (std::size_t s = 0; s < n; ++s) {
    if (weighted)
      dijkstra_from(adj, s, out);
    else
      bfs_from(adj, s, out);
  }
  return out;
}

}  // namespace cortexkit
