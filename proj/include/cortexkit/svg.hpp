#pragma once

#include <string>

#include "cortexkit/graph.hpp"
#include "cortexkit/ml.hpp"

namespace cortexkit::viz {

// Diverging scale on a_ij / max|a|: -1 is #2166ac, 0 is white, +1 is #b2182b,
// linear in between. The scale and its maximum are written into <metadata>.
std::string rgb_for(double t);
std::string adjacency_heatmap(const BrainGraph& g);

// Nodes evenly spaced on a circle, node 0 at the top, clockwise. Edge width
// scales with |a_ij|; color follows the heatmap scale.
std::string topology(const BrainGraph& g);

std::string confusion_matrix(const ml::EvalReport& r);
std::string roc_curve(const ml::EvalReport& r);

std::string xml_escape(const std::string& s);

}  // namespace cortexkit::viz
