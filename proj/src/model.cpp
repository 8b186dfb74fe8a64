#include "cortexkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cortexkit/errors.hpp"

namespace cortexkit::nn {

const Span& ModelState::layer(const std::string& name) const {
  for (const auto& s : layers)
    if (s.name == name) return s;
  throw DimensionError("model has no layer '" + name + "'");
}

std::span<double> ModelState::view(const std::string& name) {
  const Span& s = layer(name);
  return {params.data() + s.offset, s.size};
}

std::span<const double> ModelState::view(const std::string& name) const {
  const Span& s = layer(name);
  return {params.data() + s.offset, s.size};
}

std::vector<std::string> ModelState::head_layers() const {
  if (arch == Arch::mlp1) return {"head.weight", "head.bias"};
  return {"weight", "bias"};
}

std::size_t ModelState::head_size() const {
  std::size_t n = 0;
  for (const auto& name : head_layers()) n += layer(name).size;
  return n;
}

namespace {

ModelState with_layers(Arch arch, std::vector<std::pair<std::string, std::size_t>> sizes) {
  ModelState m;
  m.arch = arch;
  std::size_t offset = 0;
  for (auto& [name, size] : sizes) {
    m.layers.push_back({name, offset, size});
    offset += size;
  }
  m.params.assign(offset, 0.0);
  return m;
}

void check_mlp(const ModelState& m, const Matrix& x) {
  if (m.arch != Arch::mlp1) throw DimensionError("expected an mlp1 model");
  if (x.cols() != m.in_dim) {
    throw DimensionError("input has " + std::to_string(x.cols()) + " features, model expects " + std::to_string(m.in_dim));
  }
}

struct Layers {
  const double* w1;
  const double* b1;
  const double* w2;
  const double* b2;
};

Layers layers_of(const ModelState& m) {
  return {m.view("encoder.weight").data(), m.view("encoder.bias").data(), m.view("head.weight").data(),
          m.view("head.bias").data()};
}

void hidden_row(const ModelState& m, const Layers& l, std::span<const double> x, std::span<double> z) {
  for (std::size_t k = 0; k < m.hidden; ++k) {
    double a = l.b1[k];
    const double* w = l.w1 + k * m.in_dim;
    for (std::size_t d = 0; d < m.in_dim; ++d) a += w[d] * x[d];
    z[k] = std::tanh(a);
  }
}

void softmax_row(const ModelState& m, const Layers& l, std::span<const double> z, std::span<double> p) {
  double top = -INFINITY;
  for (std::size_t c = 0; c < m.out_dim; ++c) {
    double a = l.b2[c];
    const double* w = l.w2 + c * m.hidden;
    for (std::size_t k = 0; k < m.hidden; ++k) a += w[k] * z[k];
    p[c] = a;
    top = std::max(top, a);
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < m.out_dim; ++c) sum += (p[c] = std::exp(p[c] - top));
  for (std::size_t c = 0; c < m.out_dim; ++c) p[c] /= sum;
}

}  // namespace

ModelState make_linear(std::size_t in_dim) {
  ModelState m = with_layers(Arch::linear, {{"weight", in_dim}, {"bias", 1}});
  m.in_dim = in_dim;
  m.out_dim = 1;
  return m;
}

ModelState make_mlp(std::size_t in_dim, std::size_t hidden, std::size_t n_classes) {
  if (in_dim == 0 || hidden == 0 || n_classes < 2) throw DimensionError("mlp needs in_dim, hidden >= 1 and >= 2 classes");
  ModelState m = with_layers(Arch::mlp1, {{"encoder.weight", hidden * in_dim},
                                          {"encoder.bias", hidden},
                                          {"head.weight", n_classes * hidden},
                                          {"head.bias", n_classes}});
  m.in_dim = in_dim;
  m.hidden = hidden;
  m.out_dim = n_classes;
  return m;
}

void init_mlp(ModelState& m, SeededRng& rng) {
  const double s1 = 1.0 / std::sqrt(static_cast<double>(m.in_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(m.hidden));
  for (double& w : m.view("encoder.weight")) w = rng.normal(0.0, s1);
  for (double& b : m.view("encoder.bias")) b = 0.0;
  for (double& w : m.view("head.weight")) w = rng.normal(0.0, s2);
  for (double& b : m.view("head.bias")) b = 0.0;
}

Matrix mlp_represent(const ModelState& m, const Matrix& x) {
  check_mlp(m, x);
  const Layers l = layers_of(m);
  Matrix z(x.rows(), m.hidden);
  for (std::size_t r = 0; r < x.rows(); ++r) hidden_row(m, l, x.row(r), z.row(r));
  return z;
}

Matrix mlp_predict_proba(const ModelState& m, const Matrix& x) {
  const Matrix z = mlp_represent(m, x);
  const Layers l = layers_of(m);
  Matrix p(x.rows(), m.out_dim);
  for (std::size_t r = 0; r < x.rows(); ++r) softmax_row(m, l, z.row(r), p.row(r));
  return p;
}

ForwardBackward mlp_forward_backward(const ModelState& m, const Matrix& x, std::span<const double> y,
                                     const RepresentationTerm& extra) {
  check_mlp(m, x);
  if (y.size() != x.rows()) throw DimensionError("label count does not match batch rows");
  if (x.rows() == 0) throw DimensionError("empty batch");
  const std::size_t b = x.rows(), d = m.in_dim, h = m.hidden, c = m.out_dim;
  const Layers l = layers_of(m);

  ForwardBackward out;
  out.z = Matrix(b, h);
  Matrix p(b, c);
  for (std::size_t r = 0; r < b; ++r) {
    hidden_row(m, l, x.row(r), out.z.row(r));
    softmax_row(m, l, out.z.row(r), p.row(r));
  }

  const double inv_b = 1.0 / static_cast<double>(b);
  Matrix dz(b, h);
  if (extra) {
    auto [value, grad_z] = extra(out.z);
    if (grad_z.rows() != b || grad_z.cols() != h) throw DimensionError("representation term gradient has wrong shape");
    out.loss += value;
    dz = std::move(grad_z);
  }

  out.grad.assign(m.params.size(), 0.0);
  double* gw1 = out.grad.data() + m.layer("encoder.weight").offset;
  double* gb1 = out.grad.data() + m.layer("encoder.bias").offset;
  double* gw2 = out.grad.data() + m.layer("head.weight").offset;
  double* gb2 = out.grad.data() + m.layer("head.bias").offset;
  std::vector<double> dlogit(c), da(h);
  for (std::size_t r = 0; r < b; ++r) {
    const double label = y[r];
    if (!(label >= 0.0) || label >= static_cast<double>(c) || label != std::floor(label)) {
      throw DimensionError("label " + std::to_string(label) + " outside 0.." + std::to_string(c - 1));
    }
    const auto cls = static_cast<std::size_t>(label);
    out.loss -= std::log(p(r, cls)) * inv_b;
    const auto z = out.z.row(r);
    for (std::size_t k = 0; k < c; ++k) {
      dlogit[k] = (p(r, k) - (k == cls ? 1.0 : 0.0)) * inv_b;
      gb2[k] += dlogit[k];
      for (std::size_t j = 0; j < h; ++j) gw2[k * h + j] += dlogit[k] * z[j];
    }
    for (std::size_t j = 0; j < h; ++j) {
      double g = dz(r, j);
      for (std::size_t k = 0; k < c; ++k) g += l.w2[k * h + j] * dlogit[k];
      da[j] = g * (1.0 - z[j] * z[j]);
      gb1[j] += da[j];
    }
    const auto xr = x.row(r);
    for (std::size_t j = 0; j < h; ++j)
      for (std::size_t q = 0; q < d; ++q) gw1[j * d + q] += da[j] * xr[q];
  }
  return out;
}

Matrix gather_rows(const Matrix& x, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), x.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) std::copy(x.row(idx[r]).begin(), x.row(idx[r]).end(), out.row(r).begin());
  return out;
}

std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) out[r] = v[idx[r]];
  return out;
}

double run_epoch(ModelState& m, const Matrix& x, std::span<const double> y, std::size_t batch, SeededRng& rng,
                 const BatchStep& step) {
  if (batch == 0) throw ValueError("batch size must be positive");
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  double total = 0.0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < order.size(); start += batch) {
    const std::size_t stop = std::min(order.size(), start + batch);
    const std::span<const std::size_t> idx(order.data() + start, stop - start);
    const Matrix xb = gather_rows(x, idx);
    const std::vector<double> yb = gather(y, idx);
    total += step(m, xb, yb);
    ++batches;
  }
  return batches ? total / static_cast<double>(batches) : 0.0;
}

BatchStep sgd_step(double lr) {
  return [lr](ModelState& m, const Matrix& xb, std::span<const double> yb) {
    const auto fb = mlp_forward_backward(m, xb, yb);
    for (std::size_t i = 0; i < m.params.size(); ++i) m.params[i] -= lr * fb.grad[i];
    return fb.loss;
  };
}

}  // namespace cortexkit::nn
