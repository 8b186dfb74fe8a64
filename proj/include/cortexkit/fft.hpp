#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cortexkit {

using Complex = std::complex<double>;

// Unnormalized forward DFT: X[k] = sum_t x[t] exp(-2 pi i k t / n).
// Radix-2 for powers of two, Bluestein's chirp-z otherwise.
std::vector<Complex> fft(std::span<const Complex> x);

// Inverse with 1/n normalization, so ifft(fft(x)) == x.
std::vector<Complex> ifft(std::span<const Complex> x);

std::vector<Complex> fft_real(std::span<const double> x);

}  // namespace cortexkit
