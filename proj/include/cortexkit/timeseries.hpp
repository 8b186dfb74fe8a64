#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

#include "cortexkit/matrix.hpp"

namespace cortexkit {

/// One subject's regional BOLD signals: T timepoints (rows) x N regions (cols).
class TimeSeries {
 public:
  // Throws DimensionError when T < 2 or N < 1, ValueError on non-finite values.
  explicit TimeSeries(Matrix values, std::optional<double> repetition_time = std::nullopt);

  std::size_t timepoints() const noexcept { return values_.rows(); }
  std::size_t regions() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  std::optional<double> repetition_time() const noexcept { return repetition_time_; }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  Matrix values_;
  std::optional<double> repetition_time_;
};

// floor/ceil of a ratio-derived count. Products such as 70 * 0.7 land a few
// ulps below the integer a user means, so values within 1e-9 of an integer
// snap to it before rounding.
inline std::size_t floor_count(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::floor(x));
}

inline std::size_t ceil_count(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

}  // namespace cortexkit
