#include "cortexkit/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "cortexkit/errors.hpp"

namespace cortexkit {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t master_seed, std::string stream_id)
    : master_seed_(master_seed),
      stream_id_(std::move(stream_id)),
      engine_(splitmix64(splitmix64(master_seed) ^ fnv1a(stream_id_))) {}

SeededRng SeededRng::fork(const std::string& child) const {
  return SeededRng(master_seed_, stream_id_ + "/" + child);
}

std::uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SeededRng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw ValueError("uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return engine_();
  const std::uint64_t range = span + 1;
  // Reject the tail that would bias the modulo.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + x % range;
}

double SeededRng::normal(double mean, double stddev) {
  // Box-Muller; 1 - uniform() lies in (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

std::vector<std::size_t> SeededRng::sample_indices(std::size_t n, std::size_t k) {
  if (k > n) throw ValueError("sample_indices: k exceeds population");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = static_cast<std::size_t>(uniform_int(i, n - 1));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::size_t SeededRng::weighted_index(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValueError("weighted_index: invalid weight");
    total += w;
  }
  if (!(total > 0.0)) throw ValueError("weighted_index: weights sum to zero");
  const double target = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (target < acc) return i;
  }
  return last_positive;
}

std::vector<std::size_t> SeededRng::weighted_sample_without_replacement(std::span<const double> weights,
                                                                      std::size_t k) {
  std::vector<double> remaining(weights.begin(), weights.end());
  std::size_t positive = 0;
  for (double w : remaining) positive += w > 0.0 ? 1 : 0;
  if (k > positive) throw ValueError("weighted sample: k exceeds the number of positive weights");
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t idx = weighted_index(remaining);
    out.push_back(idx);
    remaining[idx] = 0.0;
  }
  return out;
}

}  // namespace cortexkit
