#include <doctest.h>

#include <cmath>
#include <random>

#include "cortexkit/construct.hpp"
#include "cortexkit/errors.hpp"
#include "cortexkit/linalg.hpp"
#include "oracles.hpp"

using namespace cortexkit;
using namespace cortexkit::construct;

namespace {

TimeSeries random_series(std::size_t t, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return TimeSeries(oracle::random_matrix(t, n, gen));
}

// Regions share a latent signal so correlations are far from zero.
TimeSeries mixed_series(std::size_t t, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const Matrix latent = oracle::random_matrix(t, 2, gen);
  Matrix m = oracle::random_matrix(t, n, gen, 0.7);
  for (std::size_t k = 0; k < t; ++k)
    for (std::size_t r = 0; r < n; ++r) m(k, r) += latent(k, r % 2) * (1.0 + 0.3 * static_cast<double>(r));
  return TimeSeries(m);
}

void check_graph_invariants(const BrainGraph& g) {
  const auto& a = g.adjacency();
  CHECK(a.all_finite());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    CHECK(a(i, i) == 0.0);
    for (std::size_t j = 0; j < a.rows(); ++j) CHECK(a(i, j) == a(j, i));
  }
}

std::vector<double> midranks_oracle(std::span<const double> x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double below = 0, equal = 0;
    for (double v : x) below += v < x[i], equal += v == x[i];
    r[i] = below + (equal + 1.0) / 2.0;
  }
  return r;
}

// Largest violation of the optimality conditions of
// ||X - XW||^2 + lambda |W|_1 with W_ii = 0.
double sr_kkt_residual(const Matrix& x, const Matrix& w, double lambda) {
  const Matrix g = matmul_tn(x, x);
  const Matrix grad = 2.0 * (matmul(g, w) - g);
  double worst = 0.0;
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (i == j) continue;
      const double r = w(i, j) != 0.0 ? std::abs(grad(i, j) + lambda * (w(i, j) > 0 ? 1.0 : -1.0))
                                      : std::max(0.0, std::abs(grad(i, j)) - lambda);
      worst = std::max(worst, r);
    }
  return worst;
}

// Column-wise least squares of X_j on the other columns.
double sr_least_squares_objective(const Matrix& x) {
  const std::size_t n = x.cols();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Matrix others(x.rows(), n - 1);
    for (std::size_t t = 0; t < x.rows(); ++t)
      for (std::size_t k = 0, c = 0; k < n; ++k)
        if (k != j) others(t, c++) = x(t, k);
    Matrix target(x.rows(), 1);
    for (std::size_t t = 0; t < x.rows(); ++t) target(t, 0) = x(t, j);
    const Matrix resid = target - matmul(others, matmul(pinv(others), target));
    total += resid.frobenius_norm() * resid.frobenius_norm();
  }
  return total;
}

}  // namespace

TEST_CASE("pearson") {
  SUBCASE("duplicated and negated regions") {
    Matrix m(20, 3);
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    for (std::size_t t = 0; t < 20; ++t) {
      m(t, 0) = nd(gen);
      m(t, 1) = m(t, 0);
      m(t, 2) = -m(t, 0);
    }
    const auto g = pearson(TimeSeries(m));
    CHECK(g.adjacency()(0, 1) == doctest::Approx(1.0));
    CHECK(g.adjacency()(0, 2) == doctest::Approx(-1.0));
  }
  SUBCASE("hand value") {
    const TimeSeries ts(Matrix{{1, 1}, {2, 3}, {3, 2}, {4, 4}});
    CHECK(pearson(ts).adjacency()(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("zero-variance region names its index") {
    Matrix m(5, 3, 1.0);
    m(0, 0) = 2.0;
    m(1, 2) = 3.0;
    try {
      pearson(TimeSeries(m));
      FAIL("expected DegenerateSeriesError");
    } catch (const DegenerateSeriesError& e) {
      CHECK(e.region() == 1);
    }
  }
  SUBCASE("entries in [-1,1] and positive semidefinite with unit diagonal") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto g = pearson(random_series(15, 8, s));
      check_graph_invariants(g);
      Matrix p = g.adjacency();
      for (std::size_t i = 0; i < 8; ++i) p(i, i) = 1.0;
      for (double v : g.adjacency().data()) CHECK(std::abs(v) <= 1.0);
      CHECK(sym_eig(p).values.back() >= -1e-8);
    }
  }
}

TEST_CASE("mutual information") {
  SUBCASE("plug-in value on a 2x2 joint table") {
    const TimeSeries ts(Matrix{{0, 0}, {0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 1}});
    const double expected = (2.0 / 3.0) * std::log(4.0 / 3.0) + (1.0 / 3.0) * std::log(2.0 / 3.0);
    CHECK(mutual_info(ts, 2).adjacency()(0, 1) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("Y = X gives the marginal entropy") {
    auto ts = random_series(200, 1, 3);
    Matrix m(200, 2);
    for (std::size_t t = 0; t < 200; ++t) m(t, 0) = m(t, 1) = ts.values()(t, 0);
    const auto col = ts.values().col(0);
    const double h = oracle::entropy(oracle::equal_width_bins(col, 15));
    CHECK(mutual_info(TimeSeries(m), 15).adjacency()(0, 1) == doctest::Approx(h).epsilon(1e-12));
  }
  SUBCASE("independent series are near zero") {
    const auto ts = random_series(10000, 2, 4);
    CHECK(mutual_info(ts, 10).adjacency()(0, 1) < 0.05);
  }
  SUBCASE("matches the plug-in oracle and stays non-negative") {
    const auto ts = mixed_series(60, 5, 5);
    const auto g = mutual_info(ts, 6);
    check_graph_invariants(g);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j) {
        const double mi = oracle::plugin_mi(oracle::equal_width_bins(ts.values().col(i), 6),
                                            oracle::equal_width_bins(ts.values().col(j), 6));
        CHECK(g.adjacency()(i, j) == doctest::Approx(mi).epsilon(1e-12));
        CHECK(g.adjacency()(i, j) >= 0.0);
      }
  }
  CHECK_THROWS_AS(mutual_info(random_series(10, 2, 1), 1), ValueError);
}

TEST_CASE("partial correlation") {
  SUBCASE("three regions match the pairwise formula") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto ts = mixed_series(40, 3, s);
      const auto g = partial_corr(ts, 0.0);
      const Matrix& x = ts.values();
      const auto c0 = x.col(0), c1 = x.col(1), c2 = x.col(2);
      CHECK(std::abs(g.adjacency()(0, 1) - oracle::partial3(c0, c1, c2)) < 1e-10);
      CHECK(std::abs(g.adjacency()(0, 2) - oracle::partial3(c0, c2, c1)) < 1e-10);
      CHECK(std::abs(g.adjacency()(1, 2) - oracle::partial3(c1, c2, c0)) < 1e-10);
    }
  }
  SUBCASE("conditionally independent pair") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> nd;
    Matrix m(10000, 3);
    for (std::size_t t = 0; t < 10000; ++t) {
      const double z = nd(gen);
      m(t, 0) = z + nd(gen);
      m(t, 1) = z + nd(gen);
      m(t, 2) = z;
    }
    CHECK(std::abs(partial_corr(TimeSeries(m), 0.0).adjacency()(0, 1)) < 0.05);
  }
  SUBCASE("singular covariance without ridge") {
    Matrix m = random_series(20, 3, 2).values();
    for (std::size_t t = 0; t < 20; ++t) m(t, 2) = m(t, 0) + m(t, 1);
    CHECK_THROWS_AS(partial_corr(TimeSeries(m), 0.0), SingularityError);
    CHECK_NOTHROW(partial_corr(TimeSeries(m)));
  }
  CHECK_THROWS(partial_corr(random_series(20, 2, 1), 0.0));
}

TEST_CASE("spearman") {
  SUBCASE("monotone transforms") {
    const auto ts = random_series(30, 1, 6);
    Matrix m(30, 3);
    for (std::size_t t = 0; t < 30; ++t) {
      m(t, 0) = ts.values()(t, 0);
      m(t, 1) = std::exp(m(t, 0));
      m(t, 2) = -m(t, 0);
    }
    const auto g = spearman(TimeSeries(m));
    CHECK(g.adjacency()(0, 1) == doctest::Approx(1.0));
    CHECK(g.adjacency()(0, 2) == doctest::Approx(-1.0));
  }
  SUBCASE("hand value") {
    const TimeSeries ts(Matrix{{1, 2}, {2, 1}, {3, 4}, {4, 3}});
    CHECK(spearman(ts).adjacency()(0, 1) == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("tie-free data matches the rank-difference formula") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto ts = mixed_series(25, 6, s);
      const auto g = spearman(ts);
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j)
          CHECK(std::abs(g.adjacency()(i, j) -
                         oracle::spearman_tie_free(ts.values().col(i), ts.values().col(j))) < 1e-10);
    }
  }
  SUBCASE("ties use Pearson on mid-ranks") {
    const TimeSeries ts(Matrix{{1, 3}, {2, 3}, {2, 1}, {5, 4}, {4, 4}, {2, 0}});
    const auto x = ts.values().col(0), y = ts.values().col(1);
    const double expected = oracle::pearson(midranks_oracle(x), midranks_oracle(y));
    CHECK(std::abs(spearman(ts).adjacency()(0, 1) - expected) < 1e-12);
  }
  CHECK_THROWS_AS(spearman(TimeSeries(Matrix{{1, 2}, {1, 3}, {1, 4}})), DegenerateSeriesError);
}

TEST_CASE("hofc") {
  SUBCASE("matches the row-correlation oracle") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto ts = mixed_series(30, 5, s + 20);
      Matrix p(5, 5);
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) p(i, j) = i == j ? 1.0 : oracle::pearson(ts.values().col(i), ts.values().col(j));
      const auto g = hofc(ts);
      check_graph_invariants(g);
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) CHECK(std::abs(g.adjacency()(i, j) - oracle::hofc_pair(p, i, j)) < 1e-10);
    }
  }
  SUBCASE("identical regions give identical rows") {
    Matrix m = mixed_series(30, 5, 3).values();
    for (std::size_t t = 0; t < 30; ++t) m(t, 1) = 2.0 * m(t, 0) + 1.0;
    CHECK(hofc(TimeSeries(m)).adjacency()(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("negated region gives negated rows") {
    Matrix m = mixed_series(30, 5, 4).values();
    for (std::size_t t = 0; t < 30; ++t) m(t, 1) = -m(t, 0);
    CHECK(hofc(TimeSeries(m)).adjacency()(0, 1) == doctest::Approx(-1.0));
  }
}

TEST_CASE("sparse representation") {
  const auto ts = mixed_series(20, 4, 11);
  const Matrix& x = ts.values();

  SUBCASE("lambda = 0 reaches the least-squares objective") {
    const auto rep = sparse_rep(ts, 0.0, 1e-14, 200000);
    CHECK(std::abs(sr_objective(x, rep.coefficients, 0.0) - sr_least_squares_objective(x)) < 1e-6);
  }
  SUBCASE("large lambda collapses to zero") {
    const double lam = 2.0 * matmul_tn(x, x).max_abs();
    const auto rep = sparse_rep(ts, lam);
    for (double v : rep.coefficients.data()) CHECK(v == 0.0);
    CHECK(rep.graph.edge_count() == 0);
  }
  SUBCASE("objective trace never increases and KKT holds") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto t2 = mixed_series(20, 4, 40 + s);
      const auto rep = sparse_rep(t2, 0.1);
      const auto& tr = rep.info.objective_trace;
      for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr[k] <= tr[k - 1] * (1 + 1e-12));
      CHECK(rep.info.converged);
      CHECK(sr_kkt_residual(t2.values(), rep.coefficients, 0.1) < 1e-4);
      for (std::size_t i = 0; i < 4; ++i) CHECK(rep.coefficients(i, i) == 0.0);
      check_graph_invariants(rep.graph);
    }
  }
  SUBCASE("hitting max_iters carries a warning") {
    const auto rep = sparse_rep(ts, 0.1, 1e-15, 3);
    CHECK_FALSE(rep.info.converged);
    CHECK_FALSE(rep.info.warning.empty());
  }
}

TEST_CASE("low-rank representation") {
  const auto ts = mixed_series(20, 4, 12);
  const Matrix& x = ts.values();

  SUBCASE("lambda = 0 matches the pseudo-inverse solution") {
    const auto rep = lowrank_rep(ts, 0.0, 1e-14, 200000);
    const Matrix w_ls = matmul(pinv(x), x);
    CHECK(std::abs(lr_objective(x, rep.coefficients, 0.0) - lr_objective(x, w_ls, 0.0)) < 1e-6);
  }
  SUBCASE("large lambda collapses to zero") {
    const auto rep = lowrank_rep(ts, 2.0 * spectral_norm(matmul_tn(x, x)) + 1.0);
    CHECK(rep.coefficients.max_abs() == 0.0);
  }
  SUBCASE("monotone objective and rank non-increasing in lambda") {
    std::size_t prev_rank = 99;
    for (double lam : {0.01, 1.0, 5.0, 20.0, 60.0, 200.0}) {
      const auto rep = lowrank_rep(ts, lam);
      const auto& tr = rep.info.objective_trace;
      for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr[k] <= tr[k - 1] * (1 + 1e-12));
      std::size_t rank = 0;
      const auto sv = svd(rep.coefficients).values;
      for (double s : sv) rank += s > 1e-8 * std::max(1.0, sv.front());
      CHECK(rank <= prev_rank);
      prev_rank = rank;
    }
  }
  SUBCASE("singular value thresholding") {
    std::mt19937_64 gen(2);
    const Matrix m = oracle::random_matrix(4, 4, gen);
    const auto before = svd(m).values;
    const auto after = svd(singular_value_threshold(m, 0.8)).values;
    for (std::size_t k = 0; k < 4; ++k) CHECK(after[k] == doctest::Approx(std::max(0.0, before[k] - 0.8)).epsilon(1e-9));
  }
}

TEST_CASE("sparsify") {
  const BrainGraph three(Matrix{{0, 0.9, 0.5}, {0.9, 0, 0.1}, {0.5, 0.1, 0}}, true);
  SUBCASE("K = 100 is the identity") { CHECK(sparsify(three, 100, false) == three); }
  SUBCASE("keep count is the ceiling of K% of the upper triangle") {
    const auto one = sparsify(three, 33, false);
    CHECK(one.edge_count() == 1);
    CHECK(one.adjacency()(0, 1) == 0.9);
    const auto two = sparsify(three, 34, false);
    CHECK(two.edge_count() == 2);
    CHECK(two.adjacency()(1, 2) == 0.0);
  }
  SUBCASE("binarize keeps the same support") {
    const auto g = pearson(random_series(30, 10, 9));
    for (double k : {10.0, 30.0, 50.0}) {
      const auto w = sparsify(g, k, false);
      const auto b = sparsify(g, k, true);
      CHECK_FALSE(b.weighted());
      CHECK(b.support() == w.support());
      for (double v : b.adjacency().data()) CHECK((v == 0.0 || v == 1.0));
      CHECK(sparsify(w, k, false) == w);
      CHECK(w.edge_count() == static_cast<std::size_t>(std::ceil(k / 100.0 * 45 - 1e-9)));
    }
  }
  SUBCASE("ranking by signed value") {
    const BrainGraph g(Matrix{{0, -0.9, 0.2}, {-0.9, 0, 0.1}, {0.2, 0.1, 0}}, true);
    CHECK(sparsify(g, 33, false).adjacency()(0, 2) == 0.2);
    CHECK(sparsify(g, 33, false, true).adjacency()(0, 1) == -0.9);
  }
  CHECK_THROWS_AS(sparsify(three, 0, false), ValueError);
}

TEST_CASE("build dispatches and sparsifies") {
  const auto ts = mixed_series(30, 6, 13);
  ConstructSpec spec;
  spec.method = Method::pearson;
  spec.sparsify = SparsifySpec{};
  const auto c = build(ts, spec);
  CHECK(c.graph.edge_count() == 5);  // ceil(0.3 * 15)
  CHECK_FALSE(c.solver.has_value());
  spec.method = Method::sparse_rep;
  CHECK(build(ts, spec).solver.has_value());
  CHECK(parse_method("hofc") == Method::hofc);
  CHECK_THROWS_AS(parse_method("granger"), ConfigError);
}
