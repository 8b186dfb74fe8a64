#include <doctest.h>

#include <cmath>
#include <random>

#include "cortexkit/errors.hpp"
#include "cortexkit/fft.hpp"
#include "cortexkit/linalg.hpp"
#include "cortexkit/paths.hpp"
#include "cortexkit/rng.hpp"
#include "oracles.hpp"

using namespace cortexkit;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a.data()[i] - b.data()[i]));
  return e;
}

}  // namespace

TEST_CASE("matrix basics") {
  const Matrix a{{1, 2}, {3, 4}};
  CHECK(a.trace() == 5.0);
  CHECK(a.transpose()(0, 1) == 3.0);
  CHECK(matmul(a, Matrix::identity(2)) == a);
  CHECK(matmul_tn(a, a) == matmul(a.transpose(), a));
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(matmul(a, Matrix(3, 1)), DimensionError);
}

TEST_CASE("sym_eig") {
  SUBCASE("identity") {
    const auto e = sym_eig(Matrix::identity(3));
    for (double v : e.values) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("diagonal, descending order") {
    const std::vector<double> d{2, 5, -1};
    const auto e = sym_eig(Matrix::diagonal(d));
    CHECK(e.values[0] == doctest::Approx(5));
    CHECK(e.values[1] == doctest::Approx(2));
    CHECK(e.values[2] == doctest::Approx(-1));
  }
  SUBCASE("reconstruction, orthonormality and trace on random matrices") {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 25; ++rep) {
      const std::size_t n = 2 + rep % 7;
      const Matrix m = oracle::random_symmetric(n, gen);
      const auto e = sym_eig(m);
      const Matrix rec = matmul(matmul(e.vectors, Matrix::diagonal(e.values)), e.vectors.transpose());
      CHECK(max_abs_diff(rec, m) < 1e-8 * std::max(1.0, m.max_abs()));
      CHECK(max_abs_diff(matmul_tn(e.vectors, e.vectors), Matrix::identity(n)) < 1e-8);
      double s = 0.0;
      for (double v : e.values) s += v;
      CHECK(std::abs(s - m.trace()) < 1e-8);
      for (std::size_t i = 0; i + 1 < n; ++i) CHECK(e.values[i] >= e.values[i + 1]);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(sym_eig(Matrix(2, 3)), DimensionError);
    CHECK_THROWS_AS(sym_eig(Matrix{{1, 2}, {0, 1}}), DimensionError);
  }
}

TEST_CASE("svd") {
  SUBCASE("zero matrix") {
    for (double s : svd(Matrix(3, 4)).values) CHECK(s == 0.0);
  }
  SUBCASE("orthogonal matrix") {
    const double c = std::cos(0.3), s = std::sin(0.3);
    for (double v : svd(Matrix{{c, -s}, {s, c}}).values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("reconstruction and nuclear norm against Gram eigenvalues") {
    std::mt19937_64 gen(5);
    for (auto [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{{5, 3}, {3, 5}, {6, 6}, {1, 4}}) {
      const Matrix m = oracle::random_matrix(r, c, gen);
      const auto d = svd(m);
      Matrix us = d.u;
      for (std::size_t i = 0; i < us.rows(); ++i)
        for (std::size_t k = 0; k < us.cols(); ++k) us(i, k) *= d.values[k];
      CHECK(max_abs_diff(matmul(us, d.v.transpose()), m) < 1e-8 * m.frobenius_norm());
      for (double s : d.values) CHECK(s >= 0.0);
      double trace_norm = 0.0;
      for (double ev : sym_eig(matmul_tn(m, m)).values) trace_norm += std::sqrt(std::max(0.0, ev));
      CHECK(std::abs(nuclear_norm(m) - trace_norm) < 1e-8 * std::max(1.0, trace_norm));
    }
  }
  SUBCASE("pinv solves least squares") {
    std::mt19937_64 gen(9);
    const Matrix a = oracle::random_matrix(8, 3, gen);
    const Matrix b = oracle::random_matrix(8, 1, gen);
    const Matrix x = matmul(pinv(a), b);
    const auto normal = oracle::solve(matmul_tn(a, a), matmul_tn(a, b).col(0));
    for (std::size_t i = 0; i < 3; ++i) CHECK(x(i, 0) == doctest::Approx(normal[i]).epsilon(1e-9));
  }
}

TEST_CASE("fft") {
  SUBCASE("constant vector puts all energy in bin 0") {
    const std::vector<double> x(6, 2.0);
    const auto f = fft_real(x);
    CHECK(std::abs(f[0] - Complex(12.0, 0.0)) < 1e-12);
    for (std::size_t k = 1; k < f.size(); ++k) CHECK(std::abs(f[k]) < 1e-12);
  }
  SUBCASE("impulse has a flat spectrum") {
    std::vector<double> x(7, 0.0);
    x[0] = 1.0;
    for (const auto& v : fft_real(x)) CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-12);
  }
  SUBCASE("matches the naive DFT, round trip and Parseval for lengths 1..512") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    for (std::size_t n = 1; n <= 512; ++n) {
      std::vector<Complex> x(n);
      for (auto& v : x) v = {nd(gen), nd(gen)};
      const auto f = fft(x);
      const auto back = ifft(f);
      double err = 0.0, ex = 0.0, ef = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        err = std::max(err, std::abs(back[i] - x[i]));
        ex += std::norm(x[i]);
        ef += std::norm(f[i]);
      }
      REQUIRE(err < 1e-9);
      REQUIRE(std::abs(ex - ef / static_cast<double>(n)) < 1e-9 * std::max(1.0, ex));
      if (n <= 64) {
        const auto ref = oracle::naive_dft(x);
        for (std::size_t k = 0; k < n; ++k) REQUIRE(std::abs(ref[k] - f[k]) < 1e-9 * std::sqrt(static_cast<double>(n)) * 10);
      }
    }
  }
  CHECK_THROWS_AS(fft(std::vector<Complex>{}), DimensionError);
}

TEST_CASE("shortest paths") {
  SUBCASE("path graph") {
    const auto sp = shortest_paths(oracle::to_matrix(oracle::path(3)), false);
    CHECK(sp.dist(0, 2) == 2.0);
    CHECK(sp.path_counts(0, 2) == 1.0);
  }
  SUBCASE("disconnected pair is unreachable") {
    const auto sp = shortest_paths(Matrix(2, 2), false);
    CHECK(sp.dist(0, 1) == kUnreachable);
    CHECK(sp.dist(0, 0) == 0.0);
  }
  SUBCASE("random graphs against simple-path enumeration") {
    std::mt19937_64 gen(17);
    for (int rep = 0; rep < 30; ++rep) {
      const auto a = oracle::random_graph(6, 0.45, gen);
      const auto sp = shortest_paths(oracle::to_matrix(a), false);
      const auto c = oracle::enumerate_paths(a);
      for (std::size_t h = 0; h < 6; ++h)
        for (std::size_t j = 0; j < 6; ++j) {
          if (h == j) continue;
          CHECK(sp.dist(h, j) == c.dist[h][j]);
          CHECK(sp.path_counts(h, j) == c.count[h][j]);
        }
    }
  }
  SUBCASE("weighted lengths are inverse weights") {
    const Matrix w{{0, 2, 0.25}, {2, 0, 1}, {0.25, 1, 0}};
    const auto sp = shortest_paths(w, true);
    CHECK(sp.dist(0, 2) == doctest::Approx(1.5));  // 0.5 + 1 beats 4
  }
  CHECK_THROWS_AS(shortest_paths(Matrix{{0, -1}, {-1, 0}}, false), ValueError);
}

TEST_CASE("seeded rng") {
  SeededRng a(42, "x"), b(42, "x"), c(42, "y");
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    differs = differs || va != c.next_u64();
  }
  CHECK(differs);

  SUBCASE("fork does not consume draws") {
    SeededRng p(1, "p"), q(1, "p");
    (void)p.fork("child");
    CHECK(p.next_u64() == q.next_u64());
    CHECK(p.fork("c").next_u64() == q.fork("c").next_u64());
  }
  SUBCASE("uniform_int covers the range evenly") {
    SeededRng r(3, "u");
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 50000; ++i) counts[r.uniform_int(0, 4)]++;
    for (int cnt : counts) CHECK(std::abs(cnt / 50000.0 - 0.2) < 0.01);
  }
  SUBCASE("normal moments") {
    SeededRng r(4, "n");
    double s = 0, s2 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double v = r.normal(1.0, 2.0);
      s += v;
      s2 += v * v;
    }
    const double m = s / n;
    CHECK(m == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::sqrt(s2 / n - m * m) == doctest::Approx(2.0).epsilon(0.01));
  }
  SUBCASE("sample_indices are distinct") {
    SeededRng r(5, "s");
    auto idx = r.sample_indices(10, 10);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < 10; ++i) CHECK(idx[i] == i);
    CHECK_THROWS_AS(r.sample_indices(3, 4), ValueError);
  }
}
