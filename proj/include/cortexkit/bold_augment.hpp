#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cortexkit/rng.hpp"
#include "cortexkit/timeseries.hpp"

namespace cortexkit::bold {

enum class Method { upsample, downsample, slice, jitter };

Method parse_method(const std::string& name);
std::string to_string(Method m);

struct AugmentSpec {
  Method method = Method::jitter;
  double ratio = 0.5;  // u, b or s depending on method
  double noise_mean = 0.0;
  double noise_std = 0.0;
};

// Fourier resampling of one real signal to `length` samples. The spectrum is
// zero-padded or truncated keeping conjugate symmetry; an even-length Nyquist
// bin is split on upsampling and folded on downsampling. Output is scaled so
// the sample mean is unchanged.
std::vector<double> fourier_resample(std::span<const double> x, std::size_t length);

// Output has floor(T/u) timepoints. Throws RatioError unless 0 < u < 1.
TimeSeries upsample(const TimeSeries& ts, double u);

// Output has floor(T*b) timepoints. Throws RatioError unless 0 < b < 1 and the
// result keeps at least 2 timepoints.
TimeSeries downsample(const TimeSeries& ts, double b);

// Contiguous window of floor(T*s) timepoints whose start is uniform on
// [0, T - floor(T*s)].
TimeSeries slice(const TimeSeries& ts, double s, SeededRng& rng);

// Adds i.i.d. N(mean, stddev) noise to every value, independently per region.
TimeSeries jitter(const TimeSeries& ts, double mean, double stddev, SeededRng& rng);

// First and last floor(0.9 T) timepoints, the two views used for
// contrastive pretraining. Throws ValueError when T < 10.
std::pair<TimeSeries, TimeSeries> pretrain_pair(const TimeSeries& ts);

TimeSeries apply(const TimeSeries& ts, const AugmentSpec& spec, SeededRng& rng);

}  // namespace cortexkit::bold
