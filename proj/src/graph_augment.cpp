#include "cortexkit/graph_augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cortexkit/errors.hpp"
#include "cortexkit/timeseries.hpp"

namespace cortexkit::graph_aug {

namespace {

void require_ratio(double r, const char* what) {
  if (!(r > 0.0 && r < 1.0)) throw RatioError(std::string(what) + " ratio must lie in (0,1), got " + std::to_string(r));
}

BrainGraph drop_nodes(const BrainGraph& g, const std::vector<std::size_t>& dropped) {
  std::vector<bool> gone(g.n_nodes(), false);
  for (std::size_t d : dropped) gone[d] = true;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    if (!gone[i]) keep.push_back(i);
  return g.induced(keep);
}

std::size_t checked_drop_count(const BrainGraph& g, double ratio) {
  const std::size_t n = g.n_nodes();
  const std::size_t drop = floor_count(static_cast<double>(n) * ratio);
  if (drop + 2 > n) {
    throw ValueError("dropping " + std::to_string(drop) + " of " + std::to_string(n) + " nodes leaves fewer than 2");
  }
  return drop;
}

struct EdgeList {
  std::vector<std::pair<std::size_t, std::size_t>> present, absent;
};

EdgeList list_edges(const BrainGraph& g) {
  EdgeList e;
  for (std::size_t i = 0; i < g.n_nodes(); ++i)
    for (std::size_t j = i + 1; j < g.n_nodes(); ++j) (g.has_edge(i, j) ? e.present : e.absent).emplace_back(i, j);
  return e;
}

BrainGraph with_adjacency(const BrainGraph& g, Matrix a) {
  return BrainGraph(std::move(a), g.weighted(), g.node_features(), g.labels());
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "node_drop") return Method::node_drop;
  if (name == "hub_preserving_drop") return Method::hub_preserving_drop;
  if (name == "edge_perturb") return Method::edge_perturb;
  if (name == "weight_dep_edge_removal") return Method::weight_dep_edge_removal;
  if (name == "subgraph_crop") return Method::subgraph_crop;
  if (name == "attr_mask") return Method::attr_mask;
  throw ConfigError("unknown graph augmentation method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::node_drop: return "node_drop";
    case Method::hub_preserving_drop: return "hub_preserving_drop";
    case Method::edge_perturb: return "edge_perturb";
    case Method::weight_dep_edge_removal: return "weight_dep_edge_removal";
    case Method::subgraph_crop: return "subgraph_crop";
    case Method::attr_mask: return "attr_mask";
  }
  return "?";
}

BrainGraph node_drop(const BrainGraph& g, double o, SeededRng& rng) {
  require_ratio(o, "node dropping");
  const std::size_t drop = checked_drop_count(g, o);
  if (drop == 0) return g;
  return drop_nodes(g, rng.sample_indices(g.n_nodes(), drop));
}

std::vector<double> hub_drop_probabilities(const BrainGraph& g) {
  const std::size_t n = g.n_nodes();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t degree = 0;
    for (std::size_t j = 0; j < n; ++j) degree += g.has_edge(i, j) ? 1 : 0;
    if (degree == 0) throw DegreeError("node " + std::to_string(i) + " is isolated; its drop probability is undefined");
    q[i] = 1.0 / static_cast<double>(degree);
  }
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  for (double& v : q) v /= total;
  return q;
}

BrainGraph hub_preserving_drop(const BrainGraph& g, double c, SeededRng& rng) {
  require_ratio(c, "hub-preserving dropping");
  const auto p = hub_drop_probabilities(g);
  const std::size_t drop = checked_drop_count(g, c);
  if (drop == 0) return g;
  return drop_nodes(g, rng.weighted_sample_without_replacement(p, drop));
}

BrainGraph edge_perturb(const BrainGraph& g, double e, SeededRng& rng) {
  require_ratio(e, "edge perturbation");
  const EdgeList edges = list_edges(g);
  const std::size_t count = floor_count(static_cast<double>(edges.present.size()) * e);
  if (count == 0) return g;
  if (count > edges.absent.size()) {
    throw ValueError("edge perturbation needs " + std::to_string(count) + " absent slots, graph has " +
                     std::to_string(edges.absent.size()));
  }
  double added_weight = 1.0;
  if (g.weighted()) {
    double sum = 0.0;
    for (auto [i, j] : edges.present) sum += g.adjacency()(i, j);
    added_weight = sum / static_cast<double>(edges.present.size());
  }
  Matrix a = g.adjacency();
  for (std::size_t k : rng.sample_indices(edges.present.size(), count)) {
    auto [i, j] = edges.present[k];
    a(i, j) = a(j, i) = 0.0;
  }
  for (std::size_t k : rng.sample_indices(edges.absent.size(), count)) {
    auto [i, j] = edges.absent[k];
    a(i, j) = a(j, i) = added_weight;
  }
  return with_adjacency(g, std::move(a));
}

std::vector<EdgeProbability> edge_removal_probabilities(const BrainGraph& g) {
  std::vector<EdgeProbability> out;
  double total = 0.0;
  for (auto [i, j] : list_edges(g).present) {
    // Zero entries are not edges, so |a_ij| > 0 here.
    const double q = 1.0 / std::abs(g.adjacency()(i, j));
    out.push_back({i, j, q});
    total += q;
  }
  for (auto& e : out) e.p /= total;
  return out;
}

BrainGraph weight_dep_edge_removal(const BrainGraph& g, double ratio, SeededRng& rng) {
  require_ratio(ratio, "weight-dependent edge removal");
  const auto probs = edge_removal_probabilities(g);
  const std::size_t count = floor_count(static_cast<double>(probs.size()) * ratio);
  if (count == 0) return g;
  std::vector<double> weights;
  weights.reserve(probs.size());
  for (const auto& e : probs) weights.push_back(e.p);
  Matrix a = g.adjacency();
  for (std::size_t k : rng.weighted_sample_without_replacement(weights, count)) {
    a(probs[k].i, probs[k].j) = a(probs[k].j, probs[k].i) = 0.0;
  }
  return with_adjacency(g, std::move(a));
}

CropResult subgraph_crop(const BrainGraph& g, double keep_fraction, SeededRng& rng) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw RatioError("subgraph keep fraction must lie in (0,1], got " + std::to_string(keep_fraction));
  }
  const std::size_t n = g.n_nodes();
  // A BrainGraph needs two nodes, so the walk always collects at least two.
  const std::size_t target = std::max<std::size_t>(2, ceil_count(static_cast<double>(n) * keep_fraction));
  const std::size_t seed = static_cast<std::size_t>(rng.uniform_int(0, n - 1));

  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g.has_edge(i, j)) neighbors[i].push_back(j);

  // Size of the seed's component bounds what the walk can reach.
  std::vector<bool> reach(n, false);
  std::vector<std::size_t> stack{seed};
  reach[seed] = true;
  std::size_t component = 0;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    ++component;
    for (std::size_t v : neighbors[u])
      if (!reach[v]) reach[v] = true, stack.push_back(v);
  }

  CropResult result{g, {}, false};
  std::size_t goal = target;
  if (component < target) {
    goal = component;
    result.truncated = true;
  }
  std::vector<bool> visited(n, false);
  visited[seed] = true;
  std::size_t count = 1;
  std::size_t current = seed;
  while (count < goal) {
    if (neighbors[current].empty()) {
      current = seed;
      continue;
    }
    const auto& nb = neighbors[current];
    current = nb[static_cast<std::size_t>(rng.uniform_int(0, nb.size() - 1))];
    if (!visited[current]) {
      visited[current] = true;
      ++count;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (visited[i]) result.kept.push_back(i);
  if (result.kept.size() < 2) throw ValueError("subgraph crop seed " + std::to_string(seed) + " is isolated");
  result.graph = g.induced(result.kept);
  return result;
}

BrainGraph attr_mask(const BrainGraph& g, double mask_fraction, SeededRng& rng) {
  require_ratio(mask_fraction, "attribute masking");
  if (!g.node_features()) throw MissingFeaturesError("attribute masking needs node features");
  const std::size_t n = g.n_nodes();
  const std::size_t count = floor_count(static_cast<double>(n) * mask_fraction);
  if (count == 0) return g;
  Matrix h = *g.node_features();
  for (std::size_t r : rng.sample_indices(n, count))
    for (std::size_t d = 0; d < h.cols(); ++d) h(r, d) = 0.0;
  return BrainGraph(g.adjacency(), g.weighted(), std::move(h), g.labels());
}

BrainGraph apply(const BrainGraph& g, const GraphAugmentSpec& spec, SeededRng& rng) {
  switch (spec.method) {
    case Method::node_drop: return node_drop(g, spec.ratio, rng);
    case Method::hub_preserving_drop: return hub_preserving_drop(g, spec.ratio, rng);
    case Method::edge_perturb: return edge_perturb(g, spec.ratio, rng);
    case Method::weight_dep_edge_removal: return weight_dep_edge_removal(g, spec.ratio, rng);
    case Method::subgraph_crop: return subgraph_crop(g, spec.ratio, rng).graph;
    case Method::attr_mask: return attr_mask(g, spec.ratio, rng);
  }
  throw ConfigError("unhandled graph augmentation method");
}

}  // namespace cortexkit::graph_aug
