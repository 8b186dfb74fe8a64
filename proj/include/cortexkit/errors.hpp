#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cortexkit {

// Base of every error the library throws. Input errors are the caller's fault
// (bad file, bad parameter); the CLI maps them to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, bool input_error = true)
      : std::runtime_error(what), input_error_(input_error) {}
  bool is_input_error() const noexcept { return input_error_; }

 private:
  bool input_error_;
};

#define CORTEXKIT_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

CORTEXKIT_DEFINE_ERROR(DimensionError);
CORTEXKIT_DEFINE_ERROR(ValueError);
CORTEXKIT_DEFINE_ERROR(RatioError);
CORTEXKIT_DEFINE_ERROR(SingularityError);
CORTEXKIT_DEFINE_ERROR(ConvergenceError);
CORTEXKIT_DEFINE_ERROR(DegreeError);
CORTEXKIT_DEFINE_ERROR(MissingFeaturesError);
CORTEXKIT_DEFINE_ERROR(UndefinedError);
CORTEXKIT_DEFINE_ERROR(ManifestError);
CORTEXKIT_DEFINE_ERROR(ValidationError);
CORTEXKIT_DEFINE_ERROR(ConfigError);

#undef CORTEXKIT_DEFINE_ERROR

class DegenerateSeriesError : public Error {
 public:
  explicit DegenerateSeriesError(std::size_t region)
      : Error("DegenerateSeriesError: region " + std::to_string(region) +
              " has zero variance"),
        region_(region) {}
  std::size_t region() const noexcept { return region_; }

 private:
  std::size_t region_;
};

// Location is 1-based to match what a text editor shows.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t row, std::size_t col,
             const std::string& what)
      : Error("ParseError: " + source + ":" + std::to_string(row) + ":" +
              std::to_string(col) + ": " + what),
        row_(row),
        col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace cortexkit
