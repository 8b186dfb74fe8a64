#include "cortexkit/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "cortexkit/errors.hpp"

namespace cortexkit {

namespace {

void radix2_inplace(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // Twiddles computed directly rather than by recurrence to avoid drift.
  std::vector<Complex> twiddle(n / 2);
  const double ang = 2.0 * std::numbers::pi / static_cast<double>(n) * (inverse ? 1.0 : -1.0);
  for (std::size_t k = 0; k < n / 2; ++k) twiddle[k] = std::polar(1.0, ang * static_cast<double>(k));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const Complex u = a[i + k];
        const Complex v = a[i + k + len / 2] * twiddle[k * stride];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<Complex> bluestein(std::span<const Complex> x, bool inverse) {
  const std::size_t n = x.size();
  const std::size_t m = std::bit_ceil(2 * n - 1);
  const double sign = inverse ? 1.0 : -1.0;

  std::vector<Complex> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small for large k.
    const std::size_t k2 = (k * k) % (2 * n);
    chirp[k] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n));
  }

  std::vector<Complex> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

  radix2_inplace(a, false);
  radix2_inplace(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  radix2_inplace(a, true);

  std::vector<Complex> out(n);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * inv_m * chirp[k];
  return out;
}

std::vector<Complex> transform(std::span<const Complex> x, bool inverse) {
  if (x.empty()) throw DimensionError("fft: empty input");
  std::vector<Complex> out;
  if (std::has_single_bit(x.size())) {
    out.assign(x.begin(), x.end());
    radix2_inplace(out, inverse);
  } else {
    out = bluestein(x, inverse);
  }
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(x.size());
    for (auto& v : out) v *= inv_n;
  }
  return out;
}

}  // namespace

std::vector<Complex> fft(std::span<const Complex> x) { return transform(x, false); }

std::vector<Complex> ifft(std::span<const Complex> x) { return transform(x, true); }

std::vector<Complex> fft_real(std::span<const double> x) {
  std::vector<Complex> c(x.begin(), x.end());
  return fft(c);
}

}  // namespace cortexkit
