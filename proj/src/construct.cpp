#include "cortexkit/construct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "cortexkit/errors.hpp"
#include "cortexkit/linalg.hpp"

namespace cortexkit::construct {

namespace {

// Symmetric matrix from the upper triangle, zero diagonal.
Matrix symmetric_from_upper(const Matrix& m) {
  const std::size_t n = m.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = m(i, j);
  return a;
}

BrainGraph weighted_graph(const Matrix& upper) { return BrainGraph(symmetric_from_upper(upper), true); }

Matrix centered_columns(const Matrix& x) {
  Matrix c = x;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t t = 0; t < x.rows(); ++t) mean += x(t, j);
    mean /= static_cast<double>(x.rows());
    for (std::size_t t = 0; t < x.rows(); ++t) c(t, j) -= mean;
  }
  return c;
}

Matrix sample_covariance(const Matrix& x) {
  Matrix c = centered_columns(x);
  Matrix s = matmul_tn(c, c);
  s *= 1.0 / static_cast<double>(x.rows() - 1);
  return s;
}

// W_{k+1} = prox(W_k - step * grad f(W_k)), f(W) = ||X - XW||_F^2.
template <typename Prox, typename Objective>
Representation proximal_gradient(const TimeSeries& ts, double lambda, double tol, std::size_t max_iters,
                                 Prox prox, Objective objective) {
  if (!(lambda >= 0.0)) throw ValueError("lambda must be >= 0");
  if (!(tol > 0.0)) throw ValueError("solver tolerance must be > 0");
  const Matrix& x = ts.values();
  const std::size_t n = x.cols();
  const Matrix gram = matmul_tn(x, x);
  const double lipschitz = 2.0 * std::max(sym_eig(gram).values.front(), 0.0);

  Representation rep{BrainGraph(Matrix(std::max<std::size_t>(n, 2), std::max<std::size_t>(n, 2)), true),
                     Matrix(n, n), {}};
  Matrix& w = rep.coefficients;
  SolverInfo& info = rep.info;
  double current = objective(x, w, lambda);
  info.objective_trace.push_back(current);

  if (lipschitz == 0.0) {
    info.converged = true;
  } else {
    const double step = 1.0 / lipschitz;
    // 2L|W+ - W| bounds the distance of 0 from the subdifferential at W+;
    // 2 max|XᵀX| is the smallest lambda that zeroes W.
    const double stationarity_scale = std::max(1.0, gram.max_abs());
    for (std::size_t it = 0; it < max_iters; ++it) {
      Matrix grad = matmul(gram, w);
      grad -= gram;
      grad *= 2.0;
      Matrix next = w;
      for (std::size_t k = 0; k < next.size(); ++k) next.data()[k] -= step * grad.data()[k];
      next = prox(next, step * lambda);
      const double moved = (next - w).frobenius_norm();
      w = std::move(next);
      const double value = objective(x, w, lambda);
      info.objective_trace.push_back(value);
      info.iterations = it + 1;
      const double change = std::abs(current - value);
      current = value;
      if (change <= tol * std::max(std::abs(value), 1e-300) && 2.0 * lipschitz * moved <= tol * stationarity_scale) {
        info.converged = true;
        break;
      }
    }
  }
  if (!info.converged) {
    info.warning = "ConvergenceWarning: objective change and stationarity did not reach " + std::to_string(tol) +
                   " within " + std::to_string(max_iters) + " iterations";
  }

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (w(i, j) + w(j, i));
  rep.graph = BrainGraph(std::move(a), true);
  return rep;
}

double residual_norm_sq(const Matrix& x, const Matrix& w) {
  Matrix r = x - matmul(x, w);
  double s = 0.0;
  for (double v : r.data()) s += v * v;
  return s;
}

void require_regions(const TimeSeries& ts, std::size_t min_regions, const char* what) {
  if (ts.regions() < min_regions) {
    throw DimensionError(std::string(what) + " needs at least " + std::to_string(min_regions) + " regions");
  }
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "pearson") return Method::pearson;
  if (name == "mutual_info") return Method::mutual_info;
  if (name == "partial_corr") return Method::partial_corr;
  if (name == "spearman") return Method::spearman;
  if (name == "hofc") return Method::hofc;
  if (name == "sparse_rep") return Method::sparse_rep;
  if (name == "lowrank_rep") return Method::lowrank_rep;
  throw ConfigError("unknown network construction method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::pearson: return "pearson";
    case Method::mutual_info: return "mutual_info";
    case Method::partial_corr: return "partial_corr";
    case Method::spearman: return "spearman";
    case Method::hofc: return "hofc";
    case Method::sparse_rep: return "sparse_rep";
    case Method::lowrank_rep: return "lowrank_rep";
  }
  return "?";
}

Matrix correlation_matrix(const Matrix& columns) {
  const Matrix c = centered_columns(columns);
  const std::size_t n = columns.cols();
  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < c.rows(); ++t) s += c(t, j) * c(t, j);
    if (!(s > 0.0)) throw DegenerateSeriesError(j);
    norms[j] = std::sqrt(s);
  }
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < c.rows(); ++t) s += c(t, i) * c(t, j);
      r(i, j) = r(j, i) = std::clamp(s / (norms[i] * norms[j]), -1.0, 1.0);
    }
  }
  return r;
}

std::vector<double> midranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based mid-rank
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

BrainGraph pearson(const TimeSeries& ts) {
  require_regions(ts, 2, "pearson");
  return weighted_graph(correlation_matrix(ts.values()));
}

BrainGraph mutual_info(const TimeSeries& ts, std::size_t n_bins) {
  require_regions(ts, 2, "mutual_info");
  if (n_bins < 2) throw ValueError("mutual information needs at least 2 bins");
  const std::size_t t = ts.timepoints();
  if (t < n_bins) throw ValueError("mutual information needs T >= n_bins");
  const std::size_t n = ts.regions();

  std::vector<std::vector<std::size_t>> bins(n, std::vector<std::size_t>(t));
  for (std::size_t r = 0; r < n; ++r) {
    const auto col = ts.values().col(r);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    const double width = (*hi - *lo) / static_cast<double>(n_bins);
    for (std::size_t k = 0; k < t; ++k) {
      std::size_t b = 0;
      if (width > 0.0) b = std::min(n_bins - 1, static_cast<std::size_t>((col[k] - *lo) / width));
      bins[r][k] = b;
    }
  }

  const double inv_t = 1.0 / static_cast<double>(t);
  Matrix upper(n, n);
  std::vector<double> joint(n_bins * n_bins), px(n_bins), py(n_bins);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::fill(joint.begin(), joint.end(), 0.0);
      std::fill(px.begin(), px.end(), 0.0);
      std::fill(py.begin(), py.end(), 0.0);
      for (std::size_t k = 0; k < t; ++k) {
        joint[bins[i][k] * n_bins + bins[j][k]] += inv_t;
        px[bins[i][k]] += inv_t;
        py[bins[j][k]] += inv_t;
      }
      double mi = 0.0;
      for (std::size_t a = 0; a < n_bins; ++a)
        for (std::size_t b = 0; b < n_bins; ++b) {
          const double p = joint[a * n_bins + b];
          if (p > 0.0) mi += p * std::log(p / (px[a] * py[b]));
        }
      upper(i, j) = std::max(mi, 0.0);
    }
  }
  return weighted_graph(upper);
}

BrainGraph partial_corr(const TimeSeries& ts, std::optional<double> ridge) {
  require_regions(ts, 3, "partial_corr");
  const std::size_t n = ts.regions();
  Matrix cov = sample_covariance(ts.values());
  const double eps = ridge.value_or(1e-6 * cov.trace() / static_cast<double>(n));
  if (!(eps >= 0.0)) throw ValueError("ridge must be >= 0");
  for (std::size_t i = 0; i < n; ++i) cov(i, i) += eps;
  const Matrix theta = spd_inverse(cov);
  Matrix upper(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      upper(i, j) = std::clamp(-theta(i, j) / std::sqrt(theta(i, i) * theta(j, j)), -1.0, 1.0);
  return weighted_graph(upper);
}

BrainGraph spearman(const TimeSeries& ts) {
  require_regions(ts, 2, "spearman");
  if (ts.timepoints() < 3) throw DimensionError("spearman needs at least 3 timepoints");
  Matrix ranked(ts.timepoints(), ts.regions());
  for (std::size_t r = 0; r < ts.regions(); ++r) ranked.set_col(r, midranks(ts.values().col(r)));
  return weighted_graph(correlation_matrix(ranked));
}

BrainGraph hofc(const TimeSeries& ts) {
  // Each pair is compared over the N-2 columns other than i and j, so at least
  // two shared columns are needed.
  require_regions(ts, 4, "hofc");
  const Matrix p = correlation_matrix(ts.values());
  const std::size_t n = p.rows();
  Matrix upper(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double mi = 0.0, mj = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        mi += p(i, k);
        mj += p(j, k);
      }
      mi /= static_cast<double>(n - 2);
      mj /= static_cast<double>(n - 2);
      double sij = 0.0, sii = 0.0, sjj = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double di = p(i, k) - mi;
        const double dj = p(j, k) - mj;
        sij += di * dj;
        sii += di * di;
        sjj += dj * dj;
      }
      if (!(sii > 0.0)) throw DegenerateSeriesError(i);
      if (!(sjj > 0.0)) throw DegenerateSeriesError(j);
      upper(i, j) = std::clamp(sij / std::sqrt(sii * sjj), -1.0, 1.0);
    }
  }
  return weighted_graph(upper);
}

Matrix soft_threshold(const Matrix& m, double tau) {
  Matrix out = m;
  for (double& v : out.data()) v = v > tau ? v - tau : (v < -tau ? v + tau : 0.0);
  return out;
}

Matrix singular_value_threshold(const Matrix& m, double tau) {
  const Svd d = svd(m);
  Matrix out(m.rows(), m.cols());
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    const double s = d.values[k] - tau;
    if (s <= 0.0) continue;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double us = d.u(i, k) * s;
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) += us * d.v(j, k);
    }
  }
  return out;
}

double sr_objective(const Matrix& x, const Matrix& w, double lambda) {
  double l1 = 0.0;
  for (double v : w.data()) l1 += std::abs(v);
  return residual_norm_sq(x, w) + lambda * l1;
}

double lr_objective(const Matrix& x, const Matrix& w, double lambda) {
  return residual_norm_sq(x, w) + lambda * nuclear_norm(w);
}

Representation sparse_rep(const TimeSeries& ts, double lambda, double tol, std::size_t max_iters) {
  require_regions(ts, 2, "sparse_rep");
  auto prox = [](const Matrix& m, double tau) {
    Matrix out = soft_threshold(m, tau);
    for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) = 0.0;
    return out;
  };
  return proximal_gradient(ts, lambda, tol, max_iters, prox, sr_objective);
}

Representation lowrank_rep(const TimeSeries& ts, double lambda, double tol, std::size_t max_iters) {
  require_regions(ts, 2, "lowrank_rep");
  return proximal_gradient(ts, lambda, tol, max_iters, singular_value_threshold, lr_objective);
}

BrainGraph sparsify(const BrainGraph& g, double top_percent, bool binarize, bool by_magnitude) {
  if (!(top_percent > 0.0 && top_percent <= 100.0)) {
    throw ValueError("sparsity K must lie in (0,100], got " + std::to_string(top_percent));
  }
  const std::size_t n = g.n_nodes();
  const Matrix& a = g.adjacency();
  const std::size_t upper_count = n * (n - 1) / 2;
  const std::size_t keep = ceil_count(top_percent / 100.0 * static_cast<double>(upper_count));

  struct Entry {
    double key;
    std::size_t i, j;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (a(i, j) != 0.0) entries.push_back({by_magnitude ? std::abs(a(i, j)) : a(i, j), i, j});
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.key != y.key) return x.key > y.key;
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });

  Matrix out(n, n);
  for (std::size_t k = 0; k < std::min(keep, entries.size()); ++k) {
    const auto& e = entries[k];
    const double v = binarize ? 1.0 : a(e.i, e.j);
    out(e.i, e.j) = out(e.j, e.i) = v;
  }
  return BrainGraph(std::move(out), binarize ? false : g.weighted(), g.node_features(), g.labels());
}

Construction build(const TimeSeries& ts, const ConstructSpec& spec) {
  Construction c{BrainGraph(Matrix(2, 2), true), std::nullopt};
  switch (spec.method) {
    case Method::pearson: c.graph = pearson(ts); break;
    case Method::mutual_info: {
      const std::size_t bins = spec.n_bins ? spec.n_bins
                                           : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(ts.timepoints()))));
      c.graph = mutual_info(ts, bins);
      break;
    }
    case Method::partial_corr: c.graph = partial_corr(ts, spec.ridge); break;
    case Method::spearman: c.graph = spearman(ts); break;
    case Method::hofc: c.graph = hofc(ts); break;
    case Method::sparse_rep: {
      auto rep = sparse_rep(ts, spec.lambda, spec.solver_tol, spec.solver_max_iters);
      c.graph = std::move(rep.graph);
      c.solver = std::move(rep.info);
      break;
    }
    case Method::lowrank_rep: {
      auto rep = lowrank_rep(ts, spec.lambda, spec.solver_tol, spec.solver_max_iters);
      c.graph = std::move(rep.graph);
      c.solver = std::move(rep.info);
      break;
    }
  }
  if (spec.sparsify) c.graph = sparsify(c.graph, spec.sparsify->top_percent, spec.sparsify->binarize, spec.sparsify->by_magnitude);
  return c;
}

}  // namespace cortexkit::construct
