#pragma once

// Independent reference implementations used by the tests. Everything here is
// written the slow, obvious way and shares no code with the library beyond
// the Matrix container.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cortexkit/matrix.hpp"

namespace oracle {

using cortexkit::Matrix;
using Adj = std::vector<std::vector<int>>;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- small graphs -----------------------------------------------------------

inline Adj from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  Adj a(n, std::vector<int>(n, 0));
  for (auto [i, j] : edges) a[i][j] = a[j][i] = 1;
  return a;
}

inline Matrix to_matrix(const Adj& a) {
  Matrix m(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m(i, j) = a[i][j];
  return m;
}

inline Adj support_of(const Matrix& m) {
  Adj a(m.rows(), std::vector<int>(m.rows(), 0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.rows(); ++j) a[i][j] = (i != j && m(i, j) != 0.0) ? 1 : 0;
  return a;
}

inline Adj complete(std::size_t n) {
  Adj a(n, std::vector<int>(n, 1));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 0;
  return a;
}

inline Adj star(std::size_t n) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t i = 1; i < n; ++i) e.push_back({0, static_cast<int>(i)});
  return from_edges(n, e);
}

inline Adj path(std::size_t n) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({static_cast<int>(i), static_cast<int>(i + 1)});
  return from_edges(n, e);
}

// Two triangles sharing node 2.
inline Adj bowtie() { return from_edges(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}}); }

inline Adj random_graph(std::size_t n, double p, std::mt19937_64& gen) {
  std::bernoulli_distribution coin(p);
  Adj a(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a[i][j] = a[j][i] = coin(gen) ? 1 : 0;
  return a;
}

inline std::vector<double> degrees(const Adj& a) {
  std::vector<double> d(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::accumulate(a[i].begin(), a[i].end(), 0.0);
  return d;
}

inline std::size_t edge_count(const Adj& a) {
  std::size_t l = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) l += a[i][j];
  return l;
}

// Floyd-Warshall hop distances, restricted to nodes where `allowed` is true.
inline std::vector<std::vector<double>> floyd(const Adj& a, const std::vector<bool>& allowed) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) {
    if (!allowed[i]) continue;
    d[i][i] = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (allowed[j] && a[i][j]) d[i][j] = 1.0;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

inline std::vector<std::vector<double>> floyd(const Adj& a) { return floyd(a, std::vector<bool>(a.size(), true)); }

// Every simple path from h to j (as node sequences), by depth-first search.
inline void simple_paths(const Adj& a, int h, int j, std::vector<int>& cur, std::vector<bool>& seen,
                         std::vector<std::vector<int>>& out) {
  if (h == j) {
    out.push_back(cur);
    return;
  }
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (!a[h][v] || seen[v]) continue;
    seen[v] = true;
    cur.push_back(static_cast<int>(v));
    simple_paths(a, static_cast<int>(v), j, cur, seen, out);
    cur.pop_back();
    seen[v] = false;
  }
}

struct PathCensus {
  std::vector<std::vector<double>> dist;
  std::vector<std::vector<double>> count;
  // through[h][j][i]: shortest h->j paths with i strictly inside
  std::vector<std::vector<std::vector<double>>> through;
};

inline PathCensus enumerate_paths(const Adj& a) {
  const std::size_t n = a.size();
  PathCensus c;
  c.dist.assign(n, std::vector<double>(n, kInf));
  c.count.assign(n, std::vector<double>(n, 0.0));
  c.through.assign(n, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::vector<int>> all;
      std::vector<int> cur{static_cast<int>(h)};
      std::vector<bool> seen(n, false);
      seen[h] = true;
      simple_paths(a, static_cast<int>(h), static_cast<int>(j), cur, seen, all);
      if (all.empty()) continue;
      std::size_t shortest = all.front().size();
      for (const auto& p : all) shortest = std::min(shortest, p.size());
      c.dist[h][j] = static_cast<double>(shortest - 1);
      for (const auto& p : all) {
        if (p.size() != shortest) continue;
        c.count[h][j] += 1.0;
        for (std::size_t k = 1; k + 1 < p.size(); ++k) c.through[h][j][p[k]] += 1.0;
      }
    }
  return c;
}

inline std::vector<double> betweenness(const Adj& a) {
  const std::size_t n = a.size();
  const auto c = enumerate_paths(a);
  std::vector<double> bc(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t h = 0; h < n; ++h)
      for (std::size_t j = 0; j < n; ++j) {
        if (h == j || h == i || j == i || c.count[h][j] == 0.0) continue;
        bc[i] += c.through[h][j][i] / c.count[h][j];
      }
    bc[i] /= static_cast<double>((n - 1) * (n - 2));
  }
  return bc;
}

inline double triangles_at(const Adj& a, std::size_t i) {
  double t = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t h = 0; h < a.size(); ++h) t += a[i][j] * a[i][h] * a[j][h];
  return t / 2.0;
}

inline std::vector<double> clustering(const Adj& a) {
  const auto k = degrees(a);
  std::vector<double> cc(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (k[i] >= 2) cc[i] = 2.0 * triangles_at(a, i) / (k[i] * (k[i] - 1));
  return cc;
}

inline double transitivity(const Adj& a) {
  const auto k = degrees(a);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += 2.0 * triangles_at(a, i);
    den += k[i] * (k[i] - 1);
  }
  return den > 0 ? num / den : 0.0;
}

inline std::vector<double> local_efficiency(const Adj& a) {
  const std::size_t n = a.size();
  const auto k = degrees(a);
  std::vector<double> le(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] < 2) continue;
    std::vector<bool> nb(n, false);
    for (std::size_t j = 0; j < n; ++j) nb[j] = a[i][j] != 0;
    const auto d = floyd(a, nb);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t h = 0; h < n; ++h)
        if (j != h && a[i][j] && a[i][h] && std::isfinite(d[j][h])) s += 1.0 / d[j][h];
    le[i] = s / (k[i] * (k[i] - 1));
  }
  return le;
}

inline double global_efficiency(const Adj& a) {
  const std::size_t n = a.size();
  const auto d = floyd(a);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && std::isfinite(d[i][j])) s += 1.0 / d[i][j];
  return s / static_cast<double>(n * (n - 1));
}

// Mean over reachable ordered pairs.
inline double char_path_length(const Adj& a) {
  const auto d = floyd(a);
  double s = 0.0, m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j && std::isfinite(d[i][j])) s += d[i][j], m += 1.0;
  return s / m;
}

inline double density(const Adj& a) {
  const double n = static_cast<double>(a.size());
  return 2.0 * static_cast<double>(edge_count(a)) / (n * (n - 1));
}

// Pearson correlation of the degrees at either end of each edge, counting
// every edge in both directions.
inline double assortativity(const Adj& a) {
  const auto k = degrees(a);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j]) x.push_back(k[i]), y.push_back(k[j]);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sxy += (x[t] - mx) * (y[t] - my);
    sxx += (x[t] - mx) * (x[t] - mx);
    syy += (y[t] - my) * (y[t] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double modularity(const Matrix& w, const std::vector<std::size_t>& part) {
  const std::size_t n = w.rows();
  std::vector<double> k(n, 0.0);
  double two_l = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = i == j ? 0.0 : std::abs(w(i, j));
      k[i] += v;
      two_l += v;
    }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (part[i] != part[j]) continue;
      const double v = i == j ? 0.0 : std::abs(w(i, j));
      q += v - k[i] * k[j] / two_l;
    }
  return q / two_l;
}

// Maximum modularity over every set partition (restricted growth strings).
inline double best_modularity(const Matrix& w) {
  const std::size_t n = w.rows();
  std::vector<std::size_t> part(n, 0);
  double best = -kInf;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      best = std::max(best, modularity(w, part));
      return;
    }
    for (std::size_t c = 0; c <= used; ++c) {
      part[i] = c;
      rec(i + 1, std::max(used, c + 1));
    }
  };
  part[0] = 0;
  rec(1, 1);
  return best;
}

// Leading eigenvector of a non-negative symmetric matrix by plain power
// iteration on (M + I), which avoids the period-2 oscillation of bipartite
// graphs.
inline std::pair<double, std::vector<double>> leading_eigvec(const Matrix& m, std::size_t iters = 200000) {
  const std::size_t n = m.rows();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), w(n);
  for (std::size_t it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = v[i];
      for (std::size_t j = 0; j < n; ++j) w[i] += std::abs(m(i, j)) * v[j];
    }
    double nrm = 0.0;
    for (double x : w) nrm += x * x;
    nrm = std::sqrt(nrm);
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      delta = std::max(delta, std::abs(w[i] / nrm - v[i]));
      v[i] = w[i] / nrm;
    }
    if (delta < 1e-15) break;
  }
  double lambda = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lambda += v[i] * std::abs(m(i, j)) * v[j];
  return {lambda, v};
}

// ---- estimators -------------------------------------------------------------

inline double mean(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

inline double cov(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double s = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) s += (x[t] - mx) * (y[t] - my);
  return s / static_cast<double>(x.size());
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  return cov(x, y) / std::sqrt(cov(x, x) * cov(y, y));
}

// Ranks 1..T of a tie-free sequence.
inline std::vector<double> ranks(std::span<const double> x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t below = 0;
    for (double v : x) below += v < x[i];
    r[i] = static_cast<double>(below + 1);
  }
  return r;
}

inline double spearman_tie_free(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks(x), ry = ranks(y);
  double d2 = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) d2 += (rx[t] - ry[t]) * (rx[t] - ry[t]);
  const double n = static_cast<double>(x.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

// Three-variable partial correlation of x and y given z.
inline double partial3(std::span<const double> x, std::span<const double> y, std::span<const double> z) {
  const double rxy = pearson(x, y), rxz = pearson(x, z), ryz = pearson(y, z);
  return (rxy - rxz * ryz) / std::sqrt((1 - rxz * rxz) * (1 - ryz * ryz));
}

// Correlation of rows i and j of P over the columns other than i and j.
inline double hofc_pair(const Matrix& p, std::size_t i, std::size_t j) {
  std::vector<double> a, b;
  for (std::size_t k = 0; k < p.cols(); ++k)
    if (k != i && k != j) a.push_back(p(i, k)), b.push_back(p(j, k));
  return pearson(a, b);
}

// Plug-in mutual information of two already-binned sequences.
inline double plugin_mi(const std::vector<int>& bx, const std::vector<int>& by) {
  const double n = static_cast<double>(bx.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> px, py;
  for (std::size_t t = 0; t < bx.size(); ++t) {
    joint[{bx[t], by[t]}] += 1.0 / n;
    px[bx[t]] += 1.0 / n;
    py[by[t]] += 1.0 / n;
  }
  double mi = 0.0;
  for (const auto& [k, p] : joint) mi += p * std::log(p / (px[k.first] * py[k.second]));
  return mi;
}

inline double entropy(const std::vector<int>& b) {
  const double n = static_cast<double>(b.size());
  std::map<int, double> p;
  for (int v : b) p[v] += 1.0 / n;
  double h = 0.0;
  for (const auto& [_, q] : p) h -= q * std::log(q);
  return h;
}

inline std::vector<int> equal_width_bins(std::span<const double> x, int n_bins) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  std::vector<int> b(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    int k = static_cast<int>((x[t] - *lo) / ((*hi - *lo) / n_bins));
    b[t] = std::min(k, n_bins - 1);
  }
  return b;
}

// ---- numerics ---------------------------------------------------------------

inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      out[k] += x[t] * std::polar(1.0, ang);
    }
  return out;
}

// Solves a small dense system by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    for (std::size_t k = 0; k < n; ++k) std::swap(a(c, k), a(piv, k));
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (std::size_t k = c; k < n; ++k) a(r, k) -= f * a(c, k);
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a(i, k) * x[k];
    x[i] = s / a(i, i);
  }
  return x;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (double& v : m.data()) v = nd(gen);
  return m;
}

inline Matrix random_symmetric(std::size_t n, std::mt19937_64& gen) {
  Matrix m = random_matrix(n, n, gen);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
  return m;
}

// Central finite differences of f at x.
inline std::vector<double> numeric_grad(const std::function<double(std::span<const double>)>& f, std::vector<double> x,
                                        double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double fp = f(x);
    x[i] = keep - h;
    const double fm = f(x);
    x[i] = keep;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Largest |a_i - b_i| / max(1, |b_i|).
inline double max_rel_error(std::span<const double> a, std::span<const double> b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  return e;
}

// ---- kNN --------------------------------------------------------------------

inline double knn_label(const Matrix& train, std::span<const double> y, std::span<const double> q, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < train.rows(); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < train.cols(); ++c) s += (train(i, c) - q[c]) * (train(i, c) - q[c]);
    d.push_back({s, i});
  }
  std::sort(d.begin(), d.end());
  std::map<int, int> votes;
  for (std::size_t t = 0; t < k; ++t) votes[static_cast<int>(y[d[t].second])]++;
  int best = -1, best_votes = -1;
  for (const auto& [cls, v] : votes)
    if (v > best_votes) best = cls, best_votes = v;
  return best;
}

// ---- XML ----------------------------------------------------------------------

// Minimal well-formedness check: balanced, properly nested tags, quoted
// attributes, no stray '<' or '&' in text. Enough for the SVG we emit.
inline bool xml_well_formed(const std::string& s, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while (i < s.size()) {
    if (s[i] == '&') {
      const auto semi = s.find(';', i);
      if (semi == std::string::npos) return fail("unterminated entity");
      const std::string ent = s.substr(i, semi - i + 1);
      if (ent != "&amp;" && ent != "&lt;" && ent != "&gt;" && ent != "&quot;" && ent != "&apos;")
        return fail("unknown entity " + ent);
      i = semi + 1;
      continue;
    }
    if (s[i] != '<') {
      ++i;
      continue;
    }
    if (s.compare(i, 5, "<?xml") == 0) {
      const auto e = s.find("?>", i);
      if (e == std::string::npos) return fail("bad declaration");
      i = e + 2;
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      const auto e = s.find("-->", i);
      if (e == std::string::npos) return fail("bad comment");
      i = e + 3;
      continue;
    }
    const auto close = s.find('>', i);
    if (close == std::string::npos) return fail("unterminated tag");
    std::string tag = s.substr(i + 1, close - i - 1);
    i = close + 1;
    if (!tag.empty() && tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return fail("mismatched </" + name + ">");
      stack.pop_back();
      continue;
    }
    const bool self = !tag.empty() && tag.back() == '/';
    if (self) tag.pop_back();
    std::size_t p = 0;
    while (p < tag.size() && !std::isspace(static_cast<unsigned char>(tag[p]))) ++p;
    const std::string name = tag.substr(0, p);
    if (name.empty()) return fail("empty tag name");
    if (stack.empty()) {
      if (root_seen) return fail("second root element");
      root_seen = true;
    }
    // attributes: name="value"
    while (p < tag.size()) {
      while (p < tag.size() && std::isspace(static_cast<unsigned char>(tag[p]))) ++p;
      if (p >= tag.size()) break;
      const auto eq = tag.find('=', p);
      if (eq == std::string::npos || eq + 1 >= tag.size() || tag[eq + 1] != '"') return fail("bad attribute in <" + name + ">");
      const auto end = tag.find('"', eq + 2);
      if (end == std::string::npos) return fail("unterminated attribute");
      if (tag.substr(eq + 2, end - eq - 2).find('<') != std::string::npos) return fail("'<' in attribute");
      p = end + 1;
    }
    if (!self) stack.push_back(name);
  }
  if (!stack.empty()) return fail("unclosed <" + stack.back() + ">");
  if (!root_seen) return fail("no root element");
  return true;
}

}  // namespace oracle
