#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cortexkit/bold_augment.hpp"
#include "cortexkit/errors.hpp"
#include "cortexkit/fft.hpp"
#include "oracles.hpp"

using namespace cortexkit;
using namespace cortexkit::bold;

namespace {

TimeSeries random_series(std::size_t t, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return TimeSeries(oracle::random_matrix(t, n, gen));
}

// Sum of a few sinusoids strictly below Nyquist.
TimeSeries band_limited(std::size_t t, std::size_t n) {
  Matrix m(t, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < t; ++k) {
      const double x = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(t);
      m(k, r) = 0.3 * static_cast<double>(r) + std::sin((1.0 + static_cast<double>(r)) * x) + 0.5 * std::cos(3.0 * x);
    }
  return TimeSeries(m);
}

double max_diff(const Matrix& a, const Matrix& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a.data()[i] - b.data()[i]));
  return e;
}

}  // namespace

TEST_CASE("upsample") {
  const auto ts = random_series(100, 3, 1);
  CHECK(upsample(ts, 0.5).timepoints() == 200);
  CHECK(upsample(ts, 0.3).timepoints() == 333);

  SUBCASE("constant series stays constant") {
    const TimeSeries c(Matrix(20, 2, 4.25));
    const auto up = upsample(c, 0.7);
    for (double v : up.values().data()) CHECK(v == doctest::Approx(4.25).epsilon(1e-12));
  }
  SUBCASE("a sinusoid keeps its cycle count") {
    const std::size_t t = 40, k = 3;
    Matrix m(t, 1);
    for (std::size_t i = 0; i < t; ++i) m(i, 0) = std::sin(2.0 * std::numbers::pi * k * i / t);
    const auto up = upsample(TimeSeries(m), 0.5);
    const std::size_t len = up.timepoints();
    for (std::size_t i = 0; i < len; ++i)
      CHECK(up.values()(i, 0) == doctest::Approx(std::sin(2.0 * std::numbers::pi * k * i / len)).epsilon(1e-9));
    const auto spec = fft_real(up.values().col(0));
    std::size_t peak = 1;
    for (std::size_t b = 1; b < len / 2; ++b)
      if (std::abs(spec[b]) > std::abs(spec[peak])) peak = b;
    CHECK(peak == k);
  }
  CHECK_THROWS_AS(upsample(ts, 1.0), RatioError);
  CHECK_THROWS_AS(upsample(ts, 0.0), RatioError);
}

TEST_CASE("downsample") {
  const auto ts = random_series(100, 2, 2);
  CHECK(downsample(ts, 0.5).timepoints() == 50);
  CHECK_THROWS_AS(downsample(ts, 0.01), RatioError);
  CHECK_THROWS_AS(downsample(ts, 1.5), RatioError);

  SUBCASE("constant series unchanged") {
    const TimeSeries c(Matrix(30, 1, -2.0));
    const auto dn = downsample(c, 0.4);
    CHECK(dn.timepoints() == 12);
    for (double v : dn.values().data()) CHECK(v == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("upsample then downsample recovers band-limited input") {
    for (std::size_t t : {32u, 33u, 64u, 101u}) {
      const auto x = band_limited(t, 3);
      const auto back = downsample(upsample(x, 0.5), 0.5);
      REQUIRE(back.timepoints() == t);
      CHECK(max_diff(back.values(), x.values()) < 1e-6);
    }
  }
}

TEST_CASE("resampling preserves the mean and is linear") {
  const auto x = random_series(37, 2, 3);
  const auto y = random_series(37, 2, 4);
  for (double u : {0.3, 0.5, 0.9}) {
    const auto up = upsample(x, u);
    for (std::size_t r = 0; r < 2; ++r)
      CHECK(oracle::mean(up.values().col(r)) == doctest::Approx(oracle::mean(x.values().col(r))).epsilon(1e-9));
    const TimeSeries combo(2.0 * x.values() + (-3.0) * y.values());
    const Matrix lhs = upsample(combo, u).values();
    const Matrix rhs = 2.0 * up.values() + (-3.0) * upsample(y, u).values();
    CHECK(max_diff(lhs, rhs) < 1e-9);
  }
  for (double b : {0.3, 0.5, 0.9}) {
    const auto dn = downsample(x, b);
    for (std::size_t r = 0; r < 2; ++r)
      CHECK(oracle::mean(dn.values().col(r)) == doctest::Approx(oracle::mean(x.values().col(r))).epsilon(1e-9));
  }
}

TEST_CASE("slice") {
  const auto ts = random_series(100, 2, 5);
  SeededRng rng(1, "slice");
  for (int i = 0; i < 50; ++i) {
    const auto s = slice(ts, 0.9, rng);
    REQUIRE(s.timepoints() == 90);
    // locate the start and confirm the window is contiguous
    std::size_t start = 0;
    while (start <= 10 && ts.values()(start, 0) != s.values()(0, 0)) ++start;
    REQUIRE(start <= 10);
    for (std::size_t k = 0; k < 90; ++k) CHECK(s.values()(k, 1) == ts.values()(start + k, 1));
  }

  SUBCASE("single admissible start is deterministic") {
    const auto small = random_series(3, 1, 6);
    SeededRng r(9, "s");
    const auto s = slice(small, 0.999, r);
    CHECK(s.timepoints() == 2);
    CHECK(s.values()(0, 0) == small.values()(0, 0));
  }
  SUBCASE("start index is uniform (chi-square)") {
    Matrix ramp(100, 1);
    for (std::size_t k = 0; k < 100; ++k) ramp(k, 0) = static_cast<double>(k);
    const TimeSeries r(ramp);
    SeededRng g(7, "chi");
    std::vector<double> counts(11, 0.0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(slice(r, 0.9, g).values()(0, 0))] += 1.0;
    double chi2 = 0.0;
    const double expected = draws / 11.0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 10 degrees of freedom: P(chi2 > 23.21) = 0.01
    CHECK(chi2 < 23.21);
  }
  SeededRng r(1, "x");
  CHECK_THROWS_AS(slice(ts, 1.0, r), RatioError);
}

TEST_CASE("jitter") {
  const auto ts = random_series(50, 3, 8);
  SeededRng rng(2, "j");
  CHECK(jitter(ts, 0.0, 0.0, rng) == ts);
  const auto shifted = jitter(ts, 1.0, 0.0, rng);
  for (std::size_t i = 0; i < ts.values().size(); ++i)
    CHECK(shifted.values().data()[i] == ts.values().data()[i] + 1.0);
  CHECK_THROWS_AS(jitter(ts, 0.0, -1.0, rng), ValueError);

  SUBCASE("noise moments") {
    const TimeSeries zero(Matrix(1000, 100, 0.0));
    SeededRng g(3, "noise");
    const auto out = jitter(zero, 0.2, 0.5, g);
    double s = 0, s2 = 0;
    for (double v : out.values().data()) s += v, s2 += v * v;
    const double n = static_cast<double>(out.values().size());
    const double m = s / n, sd = std::sqrt(s2 / n - m * m);
    CHECK(std::abs(m - 0.2) < 0.01);
    CHECK(std::abs(sd - 0.5) < 0.005);
  }
  SUBCASE("deterministic under a fixed stream") {
    SeededRng a(5, "d"), b(5, "d");
    CHECK(jitter(ts, 0, 1, a) == jitter(ts, 0, 1, b));
  }
}

TEST_CASE("pretrain_pair") {
  for (std::size_t t : {10u, 11u, 57u, 100u}) {
    const auto ts = random_series(t, 2, t);
    const auto [a, b] = pretrain_pair(ts);
    const std::size_t len = t * 9 / 10;
    REQUIRE(a.timepoints() == len);
    REQUIRE(b.timepoints() == len);
    CHECK(a.values()(0, 0) == ts.values()(0, 0));
    CHECK(b.values()(len - 1, 1) == ts.values()(t - 1, 1));
    CHECK(b.values()(0, 0) == ts.values()(t - len, 0));
    const std::size_t overlap = 2 * len - t;
    // the shared stretch appears at the tail of the first view and head of the second
    for (std::size_t k = 0; k < overlap; ++k) CHECK(a.values()(len - overlap + k, 0) == b.values()(k, 0));
  }
  CHECK_THROWS_AS(pretrain_pair(random_series(9, 1, 1)), ValueError);
}

TEST_CASE("apply dispatches by method") {
  const auto ts = random_series(40, 2, 9);
  SeededRng r(1, "a");
  CHECK(apply(ts, {Method::downsample, 0.5, 0, 0}, r).timepoints() == 20);
  CHECK(parse_method("slice") == Method::slice);
  CHECK_THROWS_AS(parse_method("warp"), ConfigError);
}
