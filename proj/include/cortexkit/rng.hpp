#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cortexkit {

/// Deterministic random stream identified by (master_seed, stream_id).
///
/// The same pair always yields the same draw sequence on every platform: the
/// engine is mt19937_64 (sequence fixed by the standard) and all
/// distributions are implemented here rather than taken from <random>, whose
/// distribution algorithms are implementation-defined. Streams with different
/// ids are seeded through a 64-bit hash of the id, so they are independent for
/// practical purposes. fork() derives a child stream without consuming draws.
class SeededRng {
 public:
  SeededRng(std::uint64_t master_seed, std::string stream_id);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  const std::string& stream_id() const noexcept { return stream_id_; }

  SeededRng fork(const std::string& child) const;

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform integer in [lo, hi] inclusive, without modulo bias.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double normal(double mean, double stddev);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(0, i - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices from [0, n), uniformly, in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

  // One index drawn with probability proportional to weights (all >= 0,
  // positive sum).
  std::size_t weighted_index(std::span<const double> weights);

  // k distinct indices drawn sequentially, renormalizing the remaining
  // weights after each draw. Returned in draw order.
  std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> weights,
                                                              std::size_t k);

 private:
  std::uint64_t master_seed_;
  std::string stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace cortexkit
