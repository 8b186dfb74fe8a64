#include "cortexkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cortexkit/errors.hpp"

namespace cortexkit {

namespace {

constexpr int kMaxSweeps = 100;

// Sort eigen/singular pairs descending, permuting the matching columns.
void sort_descending(std::vector<double>& values, Matrix& vectors, Matrix* second = nullptr) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> sorted(values.size());
  Matrix v(vectors.rows(), vectors.cols());
  Matrix w = second ? Matrix(second->rows(), second->cols()) : Matrix();
  for (std::size_t k = 0; k < order.size(); ++k) {
    sorted[k] = values[order[k]];
    v.set_col(k, vectors.col(order[k]));
    if (second) w.set_col(k, second->col(order[k]));
  }
  values = std::move(sorted);
  vectors = std::move(v);
  if (second) *second = std::move(w);
}

}  // namespace

SymEig sym_eig(const Matrix& m) {
  if (!m.is_square()) throw DimensionError("sym_eig: matrix is not square");
  const double scale = std::max(1.0, m.max_abs());
  if (!m.is_symmetric(1e-10 * scale)) throw DimensionError("sym_eig: matrix is not symmetric");

  const std::size_t n = m.rows();
  Matrix a = m;
  // Work on the exactly symmetric part so rotations stay consistent.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off == 0.0 || std::sqrt(off) <= 1e-15 * std::max(a.frobenius_norm(), 1e-300)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  SymEig out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  out.vectors = std::move(v);
  sort_descending(out.values, out.vectors);
  return out;
}

Svd svd(const Matrix& m) {
  if (!m.all_finite()) throw ValueError("svd: non-finite entry");
  if (m.rows() < m.cols()) {
    Svd t = svd(m.transpose());
    return Svd{std::move(t.v), std::move(t.values), std::move(t.u)};
  }
  const std::size_t rows = m.rows();
  const std::size_t k = m.cols();
  Matrix a = m;  // columns orthogonalized in place
  Matrix v = Matrix::identity(k);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          alpha += a(r, p) * a(r, p);
          beta += a(r, q) * a(r, q);
          gamma += a(r, p) * a(r, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < rows; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
    if (!rotated) break;
  }

  Svd out;
  out.values.resize(k);
  out.u = Matrix(rows, k);
  for (std::size_t j = 0; j < k; ++j) {
    double norm = 0.0;
    for (std::size_t r = 0; r < rows; ++r) norm += a(r, j) * a(r, j);
    norm = std::sqrt(norm);
    out.values[j] = norm;
    if (norm > 0.0)
      for (std::size_t r = 0; r < rows; ++r) out.u(r, j) = a(r, j) / norm;
  }
  out.v = std::move(v);
  sort_descending(out.values, out.u, &out.v);

  // Columns of U for zero singular values are completed to an orthonormal set
  // by Gram-Schmidt against the standard basis.
  const double smax = out.values.empty() ? 0.0 : out.values.front();
  for (std::size_t j = 0; j < k; ++j) {
    if (out.values[j] > 1e-300 && out.values[j] > 1e-15 * smax) continue;
    out.values[j] = out.values[j] > 1e-300 ? out.values[j] : 0.0;
    double col_norm = 0.0;
    for (std::size_t r = 0; r < rows; ++r) col_norm += out.u(r, j) * out.u(r, j);
    if (std::abs(col_norm - 1.0) < 1e-8) continue;
    for (std::size_t e = 0; e < rows; ++e) {
      std::vector<double> cand(rows, 0.0);
      cand[e] = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (i == j) continue;
        double cn = 0.0;
        for (std::size_t r = 0; r < rows; ++r) cn += out.u(r, i) * out.u(r, i);
        if (cn < 0.5) continue;
        double proj = 0.0;
        for (std::size_t r = 0; r < rows; ++r) proj += out.u(r, i) * cand[r];
        for (std::size_t r = 0; r < rows; ++r) cand[r] -= proj * out.u(r, i);
      }
      const double nrm = norm2(cand);
      if (nrm > 1e-6) {
        for (std::size_t r = 0; r < rows; ++r) out.u(r, j) = cand[r] / nrm;
        break;
      }
    }
  }
  return out;
}

double nuclear_norm(const Matrix& m) {
  const auto s = svd(m).values;
  return std::accumulate(s.begin(), s.end(), 0.0);
}

double spectral_norm(const Matrix& m) {
  const auto s = svd(m).values;
  return s.empty() ? 0.0 : s.front();
}

Matrix pinv(const Matrix& m, double rcond) {
  const Svd d = svd(m);
  const double cutoff = d.values.empty() ? 0.0 : rcond * d.values.front();
  Matrix out(m.cols(), m.rows());
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    if (d.values[k] <= cutoff || d.values[k] == 0.0) continue;
    const double inv = 1.0 / d.values[k];
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const double vik = d.v(i, k) * inv;
      if (vik == 0.0) continue;
      for (std::size_t j = 0; j < m.rows(); ++j) out(i, j) += vik * d.u(j, k);
    }
  }
  return out;
}

Matrix spd_inverse(const Matrix& m, double rcond) {
  const SymEig e = sym_eig(m);
  const std::size_t n = m.rows();
  const double top = e.values.empty() ? 0.0 : e.values.front();
  if (n == 0 || top <= 0.0 || e.values.back() <= rcond * top) {
    throw SingularityError("matrix is singular or not positive definite");
  }
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double inv = 1.0 / e.values[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += e.vectors(i, k) * inv * e.vectors(j, k);
  }
  return out;
}

}  // namespace cortexkit
