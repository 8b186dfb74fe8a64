#pragma once

#include <string>
#include <vector>

#include "cortexkit/graph.hpp"
#include "cortexkit/rng.hpp"

namespace cortexkit::graph_aug {

enum class Method { node_drop, hub_preserving_drop, edge_perturb, weight_dep_edge_removal, subgraph_crop, attr_mask };

Method parse_method(const std::string& name);
std::string to_string(Method m);

struct GraphAugmentSpec {
  Method method = Method::node_drop;
  double ratio = 0.1;
};

// Removes floor(N*o) uniformly chosen nodes with their edges.
BrainGraph node_drop(const BrainGraph& g, double o, SeededRng& rng);

// Drop probabilities p_i = (1/d_i) / sum_k (1/d_k), d_i the binary degree.
// Throws DegreeError if some node is isolated.
std::vector<double> hub_drop_probabilities(const BrainGraph& g);

// Removes floor(N*c) nodes drawn without replacement from p_i, renormalizing
// after each draw.
BrainGraph hub_preserving_drop(const BrainGraph& g, double c, SeededRng& rng);

// Removes floor(|E|*e) uniform existing edges and adds as many uniform edges
// drawn from the originally absent slots. Added edges weigh 1 in a binary
// graph and the mean existing weight otherwise.
BrainGraph edge_perturb(const BrainGraph& g, double e, SeededRng& rng);

struct EdgeProbability {
  std::size_t i, j;  // i < j
  double p;
};

// Removal probabilities p_ij proportional to 1/|a_ij| over existing edges,
// listed in row-major upper-triangle order.
std::vector<EdgeProbability> edge_removal_probabilities(const BrainGraph& g);

BrainGraph weight_dep_edge_removal(const BrainGraph& g, double ratio, SeededRng& rng);

struct CropResult {
  BrainGraph graph;
  std::vector<std::size_t> kept;  // original indices, ascending
  bool truncated = false;         // the seed's component was smaller than the target
};

// Random walk from a uniform seed node until ceil(N*keep_fraction) distinct
// nodes are visited; returns the induced subgraph.
CropResult subgraph_crop(const BrainGraph& g, double keep_fraction, SeededRng& rng);

// Zeroes floor(N*f) uniformly chosen rows of the node features.
// Throws MissingFeaturesError when the graph has none.
BrainGraph attr_mask(const BrainGraph& g, double mask_fraction, SeededRng& rng);

BrainGraph apply(const BrainGraph& g, const GraphAugmentSpec& spec, SeededRng& rng);

}  // namespace cortexkit::graph_aug
