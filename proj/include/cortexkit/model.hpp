#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cortexkit/matrix.hpp"
#include "cortexkit/rng.hpp"

namespace cortexkit::nn {

enum class Arch { linear, mlp1 };

struct Span {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Flat parameter vector plus named spans that partition it.
//   linear: weight (d), bias (1)
//   mlp1:   encoder.weight (h x d), encoder.bias (h), head.weight (c x h), head.bias (c)
struct ModelState {
  Arch arch = Arch::linear;
  std::size_t in_dim = 0;
  std::size_t hidden = 0;
  std::size_t out_dim = 0;
  std::vector<double> params;
  std::vector<Span> layers;

  const Span& layer(const std::string& name) const;
  std::span<double> view(const std::string& name);
  std::span<const double> view(const std::string& name) const;
  // Spans sent to the server by head-only strategies.
  std::vector<std::string> head_layers() const;
  std::size_t head_size() const;

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

ModelState make_linear(std::size_t in_dim);
ModelState make_mlp(std::size_t in_dim, std::size_t hidden, std::size_t n_classes);

// Encoder weights ~ N(0, 1/d), head weights ~ N(0, 1/h), biases 0. Draws are
// taken in parameter order.
void init_mlp(ModelState& m, SeededRng& rng);

// Extra loss on the hidden representation: given z (batch x h) returns the
// term's value and dL/dz. Lets callers add contrastive terms without touching
// the backward pass.
using RepresentationTerm = std::function<std::pair<double, Matrix>(const Matrix& z)>;

struct ForwardBackward {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as params
  Matrix z;                  // tanh hidden activations, batch x h
};

// Mean softmax cross-entropy of the mlp1 model on the rows of x with integer
// labels y, plus the optional representation term. Throws DimensionError on a
// shape mismatch.
ForwardBackward mlp_forward_backward(const ModelState& m, const Matrix& x, std::span<const double> y,
                                     const RepresentationTerm& extra = {});

// Hidden representation only.
Matrix mlp_represent(const ModelState& m, const Matrix& x);

// Class probabilities, rows x n_classes.
Matrix mlp_predict_proba(const ModelState& m, const Matrix& x);

// Rows of x selected by idx, in order.
Matrix gather_rows(const Matrix& x, std::span<const std::size_t> idx);
std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> idx);

// Update applied to one minibatch: receives params, the batch and its labels,
// and updates params in place. Returns the minibatch loss.
using BatchStep = std::function<double(ModelState& m, const Matrix& xb, std::span<const double> yb)>;

// One pass over the rows in an order shuffled by rng, minibatches of `batch`
// rows (the last one may be shorter). Returns the mean minibatch loss.
double run_epoch(ModelState& m, const Matrix& x, std::span<const double> y, std::size_t batch, SeededRng& rng,
                 const BatchStep& step);

// Plain SGD step on the cross-entropy loss.
BatchStep sgd_step(double lr);

}  // namespace cortexkit::nn
