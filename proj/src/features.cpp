#include "cortexkit/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "cortexkit/errors.hpp"
#include "cortexkit/paths.hpp"

namespace cortexkit::features {

namespace {

using Adjacency = std::vector<std::vector<std::size_t>>;

Adjacency neighbor_lists(const BrainGraph& g) {
  Adjacency nb(g.n_nodes());
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    for (std::size_t j = 0; j < g.n_nodes(); ++j)
      if (g.has_edge(i, j)) nb[i].push_back(j);
  return nb;
}

std::vector<double> triangles(const BrainGraph& g, const Adjacency& nb) {
  std::vector<double> t(g.n_nodes(), 0.0);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const auto& ni = nb[i];
    for (std::size_t a = 0; a < ni.size(); ++a)
      for (std::size_t b = a + 1; b < ni.size(); ++b)
        if (g.has_edge(ni[a], ni[b])) t[i] += 1.0;
  }
  return t;
}

Matrix hop_distances(const BrainGraph& g) { return shortest_paths(g.support(), false).dist; }

const std::string& checked_name(const std::string& name, const std::vector<std::string>& known) {
  if (std::find(known.begin(), known.end(), name) == known.end()) throw ConfigError("unknown network feature '" + name + "'");
  return name;
}

}  // namespace

std::vector<double> node_degree(const BrainGraph& g) {
  std::vector<double> d(g.n_nodes(), 0.0);
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    for (std::size_t j = 0; j < g.n_nodes(); ++j) d[i] += g.has_edge(i, j) ? 1.0 : 0.0;
  return d;
}

std::vector<double> node_strength(const BrainGraph& g) {
  std::vector<double> s(g.n_nodes(), 0.0);
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    for (std::size_t j = 0; j < g.n_nodes(); ++j) s[i] += g.adjacency()(i, j);
  return s;
}

std::vector<double> local_efficiency(const BrainGraph& g) {
  const Adjacency nb = neighbor_lists(g);
  std::vector<double> le(g.n_nodes(), 0.0);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const auto& ni = nb[i];
    const std::size_t k = ni.size();
    if (k < 2) continue;
    Matrix sub(k, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) sub(a, b) = g.has_edge(ni[a], ni[b]) ? 1.0 : 0.0;
    const Matrix dist = shortest_paths(sub, false).dist;
    double sum = 0.0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        if (a != b && dist(a, b) != kUnreachable) sum += 1.0 / dist(a, b);
    le[i] = sum / static_cast<double>(k * (k - 1));
  }
  return le;
}

std::vector<double> betweenness(const BrainGraph& g) {
  const std::size_t n = g.n_nodes();
  if (n < 3) throw DimensionError("betweenness needs at least 3 nodes");
  const Adjacency nb = neighbor_lists(g);
  std::vector<double> bc(n, 0.0);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    for (auto& p : preds) p.clear();
    std::vector<std::size_t> order;
    std::queue<std::size_t> q;
    sigma[s] = 1.0;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      order.push_back(v);
      for (std::size_t w : nb[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  const double norm = 1.0 / static_cast<double>((n - 1) * (n - 2));
  for (double& v : bc) v *= norm;
  return bc;
}

std::vector<double> clustering_coeff(const BrainGraph& g) {
  const Adjacency nb = neighbor_lists(g);
  const auto t = triangles(g, nb);
  std::vector<double> cc(g.n_nodes(), 0.0);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const double k = static_cast<double>(nb[i].size());
    if (k >= 2) cc[i] = 2.0 * t[i] / (k * (k - 1.0));
  }
  return cc;
}

EigenvectorCentrality eigenvector_centrality(const BrainGraph& g, double tol, std::size_t max_iters) {
  const std::size_t n = g.n_nodes();
  const Adjacency nb = neighbor_lists(g);

  std::vector<std::vector<std::size_t>> components;
  std::vector<bool> seen(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp{s};
    seen[s] = true;
    for (std::size_t k = 0; k < comp.size(); ++k)
      for (std::size_t v : nb[comp[k]])
        if (!seen[v]) seen[v] = true, comp.push_back(v);
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }

  EigenvectorCentrality best;
  best.disconnected = components.size() > 1;
  best.eigenvalue = -1.0;
  for (const auto& comp : components) {
    const std::size_t m = comp.size();
    if (m < 2) continue;
    Matrix a(m, m);
    double max_row = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        a(i, j) = std::abs(g.adjacency()(comp[i], comp[j]));
        row += a(i, j);
      }
      max_row = std::max(max_row, row);
    }
    // Shifting by c > 0 keeps the Perron vector dominant on bipartite graphs,
    // where -lambda_max is also an eigenvalue of A.
    const double shift = 0.5 * max_row;
    std::vector<double> v(m, 1.0 / std::sqrt(static_cast<double>(m)));
    double lambda = 0.0;
    bool converged = false;
    for (std::size_t it = 0; it < max_iters; ++it) {
      std::vector<double> av = matvec(a, v);
      lambda = dot(v, av);
      double residual = 0.0;
      for (std::size_t i = 0; i < m; ++i) residual += (av[i] - lambda * v[i]) * (av[i] - lambda * v[i]);
      if (std::sqrt(residual) < tol * std::max(1.0, lambda)) {
        converged = true;
        break;
      }
      for (std::size_t i = 0; i < m; ++i) av[i] += shift * v[i];
      const double norm = norm2(av);
      for (std::size_t i = 0; i < m; ++i) v[i] = av[i] / norm;
    }
    if (!converged) throw ConvergenceError("eigenvector centrality did not converge in " + std::to_string(max_iters) + " iterations");
    if (lambda > best.eigenvalue) {
      best.eigenvalue = lambda;
      best.values.assign(n, 0.0);
      for (std::size_t i = 0; i < m; ++i) best.values[comp[i]] = std::max(v[i], 0.0);
    }
  }
  if (best.values.empty()) {
    // No edges at all: every node is equally (un)important.
    best.values.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
    best.eigenvalue = 0.0;
  }
  const double norm = norm2(best.values);
  for (double& x : best.values) x /= norm;
  return best;
}

double density(const BrainGraph& g) {
  const double n = static_cast<double>(g.n_nodes());
  return 2.0 * static_cast<double>(g.edge_count()) / (n * (n - 1.0));
}

double modularity_of(const BrainGraph& g, const std::vector<std::size_t>& assignment) {
  const std::size_t n = g.n_nodes();
  if (assignment.size() != n) throw DimensionError("assignment length does not match node count");
  std::vector<double> k(n, 0.0);
  double two_l = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double w = std::abs(g.adjacency()(i, j));
      k[i] += w;
      two_l += w;
    }
  if (!(two_l > 0.0)) throw ValueError("modularity is undefined on a graph without edges");
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (assignment[i] == assignment[j]) q += std::abs(g.adjacency()(i, j)) - k[i] * k[j] / two_l;
  return q / two_l;
}

Modularity modularity(const BrainGraph& g) {
  const std::size_t n = g.n_nodes();
  double two_l = 0.0;
  std::vector<double> k(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      k[i] += std::abs(g.adjacency()(i, j));
      two_l += std::abs(g.adjacency()(i, j));
    }
  if (!(two_l > 0.0)) throw ValueError("modularity is undefined on a graph without edges");

  // e(a,b): fraction of edge weight between communities a and b (ordered
  // pairs); share[a]: fraction of edge endpoints in a. Gain of merging a and
  // b is 2 (e(a,b) - share[a] share[b]).
  std::vector<std::size_t> community(n);
  std::vector<bool> alive(n, true);
  Matrix e(n, n);
  std::vector<double> share(n);
  for (std::size_t i = 0; i < n; ++i) {
    community[i] = i;
    share[i] = k[i] / two_l;
    for (std::size_t j = 0; j < n; ++j) e(i, j) = std::abs(g.adjacency()(i, j)) / two_l;
  }
  constexpr double kMinGain = 1e-12;
  while (true) {
    double best_gain = kMinGain;
    std::size_t ba = n, bb = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!alive[b] || e(a, b) == 0.0) continue;
        const double gain = 2.0 * (e(a, b) - share[a] * share[b]);
        if (gain > best_gain) {
          best_gain = gain;
          ba = a;
          bb = b;
        }
      }
    }
    if (ba == n) break;
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c]) continue;
      e(ba, c) += e(bb, c);
      e(c, ba) = e(ba, c);
    }
    e(ba, ba) += e(bb, bb);  // the (ba,bb) and (bb,ba) terms were folded in above
    share[ba] += share[bb];
    alive[bb] = false;
    for (std::size_t i = 0; i < n; ++i)
      if (community[i] == bb) community[i] = ba;
  }

  Modularity out;
  out.assignment.resize(n);
  std::vector<std::size_t> relabel(n, n);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (relabel[community[i]] == n) relabel[community[i]] = next++;
    out.assignment[i] = relabel[community[i]];
  }
  out.value = modularity_of(g, out.assignment);
  return out;
}

PathLength char_path_length(const BrainGraph& g) {
  const Matrix d = hop_distances(g);
  const std::size_t n = g.n_nodes();
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && d(i, j) != kUnreachable) {
        sum += d(i, j);
        ++pairs;
      }
  if (pairs == 0) throw UndefinedError("characteristic path length: no connected pairs");
  return {sum / static_cast<double>(pairs), pairs < n * (n - 1)};
}

double global_efficiency(const BrainGraph& g) {
  const Matrix d = hop_distances(g);
  const std::size_t n = g.n_nodes();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && d(i, j) != kUnreachable) sum += 1.0 / d(i, j);
  return sum / static_cast<double>(n * (n - 1));
}

double assortativity(const BrainGraph& g) {
  const auto k = node_degree(g);
  double prod = 0.0, mean = 0.0, sq = 0.0;
  std::size_t l = 0;
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    for (std::size_t j = i + 1; j < g.n_nodes(); ++j) {
      if (!g.has_edge(i, j)) continue;
      prod += k[i] * k[j];
      mean += 0.5 * (k[i] + k[j]);
      sq += 0.5 * (k[i] * k[i] + k[j] * k[j]);
      ++l;
    }
  if (l == 0) throw UndefinedError("assortativity: graph has no edges");
  const double inv_l = 1.0 / static_cast<double>(l);
  const double m2 = (mean * inv_l) * (mean * inv_l);
  const double num = prod * inv_l - m2;
  const double den = sq * inv_l - m2;
  if (std::abs(den) <= 1e-12 * std::max(1.0, sq * inv_l)) {
    throw UndefinedError("assortativity: degree variance over edge endpoints is zero");
  }
  return num / den;
}

double transitivity(const BrainGraph& g) {
  const Adjacency nb = neighbor_lists(g);
  const auto t = triangles(g, nb);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const double k = static_cast<double>(nb[i].size());
    num += 2.0 * t[i];
    den += k * (k - 1.0);
  }
  return den > 0.0 ? num / den : 0.0;
}

NodeFeatureTable node_features(const BrainGraph& g, const std::vector<std::string>& selection) {
  for (const auto& s : selection) checked_name(s, kNodeFeatureNames);
  NodeFeatureTable table;
  for (const auto& name : kNodeFeatureNames) {
    if (std::find(selection.begin(), selection.end(), name) == selection.end()) continue;
    table.names.push_back(name);
    if (name == "degree") table.columns.push_back(node_degree(g));
    else if (name == "strength") table.columns.push_back(node_strength(g));
    else if (name == "local_efficiency") table.columns.push_back(local_efficiency(g));
    else if (name == "betweenness") table.columns.push_back(betweenness(g));
    else if (name == "eigenvector_centrality") table.columns.push_back(eigenvector_centrality(g).values);
    else table.columns.push_back(clustering_coeff(g));
  }
  return table;
}

GraphFeatureSet graph_features(const BrainGraph& g, const std::vector<std::string>& selection) {
  for (const auto& s : selection) checked_name(s, kGraphFeatureNames);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  GraphFeatureSet set;
  for (const auto& name : kGraphFeatureNames) {
    if (std::find(selection.begin(), selection.end(), name) == selection.end()) continue;
    set.names.push_back(name);
    double value = kNaN;
    if (name == "density") {
      value = density(g);
    } else if (name == "modularity") {
      if (g.edge_count() > 0) {
        auto m = modularity(g);
        value = m.value;
        set.community_assignment = std::move(m.assignment);
      }
    } else if (name == "char_path_length") {
      try {
        value = char_path_length(g).value;
      } catch (const UndefinedError&) {
      }
    } else if (name == "global_efficiency") {
      value = global_efficiency(g);
    } else if (name == "assortativity") {
      try {
        value = assortativity(g);
      } catch (const UndefinedError&) {
      }
    } else {
      value = transitivity(g);
    }
    set.values.push_back(value);
  }
  return set;
}

}  // namespace cortexkit::features
