#include "cortexkit/bold_augment.hpp"

#include "cortexkit/errors.hpp"
#include "cortexkit/fft.hpp"

namespace cortexkit {

TimeSeries::TimeSeries(Matrix values, std::optional<double> repetition_time)
    : values_(std::move(values)), repetition_time_(repetition_time) {
  if (values_.rows() < 2) throw DimensionError("time series needs at least 2 timepoints");
  if (values_.cols() < 1) throw DimensionError("time series needs at least 1 region");
  if (!values_.all_finite()) throw ValueError("time series contains non-finite values");
}

namespace bold {

namespace {

void require_open_unit(double ratio, const char* what) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw RatioError(std::string(what) + " ratio must lie in (0,1), got " + std::to_string(ratio));
  }
}

TimeSeries resample_all(const TimeSeries& ts, std::size_t length) {
  Matrix out(length, ts.regions());
  for (std::size_t r = 0; r < ts.regions(); ++r) out.set_col(r, fourier_resample(ts.values().col(r), length));
  return TimeSeries(std::move(out), ts.repetition_time());
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "upsample") return Method::upsample;
  if (name == "downsample") return Method::downsample;
  if (name == "slice") return Method::slice;
  if (name == "jitter") return Method::jitter;
  throw ConfigError("unknown BOLD augmentation method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::upsample: return "upsample";
    case Method::downsample: return "downsample";
    case Method::slice: return "slice";
    case Method::jitter: return "jitter";
  }
  return "?";
}

std::vector<double> fourier_resample(std::span<const double> x, std::size_t length) {
  const std::size_t n = x.size();
  if (n == 0 || length == 0) throw DimensionError("fourier_resample: empty signal");
  if (length == n) return {x.begin(), x.end()};

  const std::vector<Complex> spec = fft_real(x);
  std::vector<Complex> out(length);
  const std::size_t shared = std::min(n, length);
  out[0] = spec[0];
  for (std::size_t k = 1; k <= (shared - 1) / 2; ++k) {
    out[k] = spec[k];
    out[length - k] = spec[n - k];
  }
  if (shared % 2 == 0) {
    const std::size_t h = shared / 2;
    if (length < n) {
      out[h] = spec[h] + spec[n - h];
    } else {
      out[h] = 0.5 * spec[h];
      out[length - h] = 0.5 * spec[h];
    }
  }
  const std::vector<Complex> y = ifft(out);
  const double scale = static_cast<double>(length) / static_cast<double>(n);
  std::vector<double> result(length);
  for (std::size_t t = 0; t < length; ++t) result[t] = y[t].real() * scale;
  return result;
}

TimeSeries upsample(const TimeSeries& ts, double u) {
  require_open_unit(u, "upsampling");
  return resample_all(ts, floor_count(static_cast<double>(ts.timepoints()) / u));
}

TimeSeries downsample(const TimeSeries& ts, double b) {
  require_open_unit(b, "downsampling");
  const std::size_t length = floor_count(static_cast<double>(ts.timepoints()) * b);
  if (length < 2) {
    throw RatioError("downsampling " + std::to_string(ts.timepoints()) + " timepoints by " +
                     std::to_string(b) + " leaves fewer than 2");
  }
  return resample_all(ts, length);
}

TimeSeries slice(const TimeSeries& ts, double s, SeededRng& rng) {
  require_open_unit(s, "slicing");
  const std::size_t t = ts.timepoints();
  const std::size_t length = floor_count(static_cast<double>(t) * s);
  if (length < 2) throw RatioError("slicing leaves fewer than 2 timepoints");
  const std::size_t start = static_cast<std::size_t>(rng.uniform_int(0, t - length));
  Matrix out(length, ts.regions());
  for (std::size_t i = 0; i < length; ++i)
    for (std::size_t r = 0; r < ts.regions(); ++r) out(i, r) = ts.values()(start + i, r);
  return TimeSeries(std::move(out), ts.repetition_time());
}

TimeSeries jitter(const TimeSeries& ts, double mean, double stddev, SeededRng& rng) {
  if (!(stddev >= 0.0)) throw ValueError("noise standard deviation must be >= 0");
  if (mean == 0.0 && stddev == 0.0) return ts;
  Matrix out = ts.values();
  for (double& v : out.data()) v += rng.normal(mean, stddev);
  return TimeSeries(std::move(out), ts.repetition_time());
}

std::pair<TimeSeries, TimeSeries> pretrain_pair(const TimeSeries& ts) {
  const std::size_t t = ts.timepoints();
  if (t < 10) throw ValueError("pretraining views need at least 10 timepoints, got " + std::to_string(t));
  const std::size_t length = floor_count(0.9 * static_cast<double>(t));
  Matrix first(length, ts.regions());
  Matrix last(length, ts.regions());
  const std::size_t offset = t - length;
  for (std::size_t i = 0; i < length; ++i) {
    for (std::size_t r = 0; r < ts.regions(); ++r) {
      first(i, r) = ts.values()(i, r);
      last(i, r) = ts.values()(offset + i, r);
    }
  }
  return {TimeSeries(std::move(first), ts.repetition_time()), TimeSeries(std::move(last), ts.repetition_time())};
}

TimeSeries apply(const TimeSeries& ts, const AugmentSpec& spec, SeededRng& rng) {
  switch (spec.method) {
    case Method::upsample: return upsample(ts, spec.ratio);
    case Method::downsample: return downsample(ts, spec.ratio);
    case Method::slice: return slice(ts, spec.ratio, rng);
    case Method::jitter: return jitter(ts, spec.noise_mean, spec.noise_std, rng);
  }
  throw ConfigError("unhandled augmentation method");
}

}  // namespace bold
}  // namespace cortexkit
