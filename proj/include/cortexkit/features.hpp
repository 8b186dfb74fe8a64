#pragma once

#include <string>
#include <vector>

#include "cortexkit/graph.hpp"

namespace cortexkit::features {

// Path- and triangle-based measures (degree, local efficiency, betweenness,
// clustering, density, path length, efficiency, assortativity, transitivity)
// read the binary support of the adjacency. Strength uses the signed
// weights. Eigenvector centrality and modularity use |a_ij|.

std::vector<double> node_degree(const BrainGraph& g);
std::vector<double> node_strength(const BrainGraph& g);
std::vector<double> local_efficiency(const BrainGraph& g);
// Normalized by 1/((N-1)(N-2)) over ordered pairs. Needs N >= 3.
std::vector<double> betweenness(const BrainGraph& g);
std::vector<double> clustering_coeff(const BrainGraph& g);

struct EigenvectorCentrality {
  std::vector<double> values;  // unit L2 norm, non-negative
  double eigenvalue = 0.0;
  // Support is disconnected: the vector lives on the component with the
  // largest leading eigenvalue and is zero elsewhere.
  bool disconnected = false;
};

// Shifted power iteration on |A|; stops when ||Av - lambda v|| < tol.
// Throws ConvergenceError after max_iters.
EigenvectorCentrality eigenvector_centrality(const BrainGraph& g, double tol = 1e-12,
                                             std::size_t max_iters = 100000);

double density(const BrainGraph& g);

struct Modularity {
  double value = 0.0;
  std::vector<std::size_t> assignment;  // community ids, contiguous from 0 in order of first node
};

// Greedy agglomeration: repeatedly merges the community pair with the largest
// positive gain, ties to the lowest (a, b) index pair. Throws ValueError when
// the graph has no edges.
Modularity modularity(const BrainGraph& g);

// Modularity of a given partition under the same |a_ij| weighting.
double modularity_of(const BrainGraph& g, const std::vector<std::size_t>& assignment);

struct PathLength {
  double value = 0.0;
  bool disconnected = false;  // averaged over reachable ordered pairs only
};

// Throws UndefinedError when no pair of distinct nodes is connected.
PathLength char_path_length(const BrainGraph& g);
double global_efficiency(const BrainGraph& g);
// Throws UndefinedError when the degree variance over edge endpoints is zero.
double assortativity(const BrainGraph& g);
double transitivity(const BrainGraph& g);

inline const std::vector<std::string> kNodeFeatureNames = {
    "degree", "strength", "local_efficiency", "betweenness", "eigenvector_centrality", "clustering_coeff"};
inline const std::vector<std::string> kGraphFeatureNames = {
    "density", "modularity", "char_path_length", "global_efficiency", "assortativity", "transitivity"};

struct NodeFeatureTable {
  std::vector<std::string> names;            // selected, in canonical order
  std::vector<std::vector<double>> columns;  // one per name, length N
};

struct GraphFeatureSet {
  std::vector<std::string> names;
  std::vector<double> values;  // NaN where the measure is undefined for this graph
  std::vector<std::size_t> community_assignment;
};

// Unknown names throw ConfigError. Selections are reordered canonically.
NodeFeatureTable node_features(const BrainGraph& g, const std::vector<std::string>& selection);
GraphFeatureSet graph_features(const BrainGraph& g, const std::vector<std::string>& selection);

}  // namespace cortexkit::features
