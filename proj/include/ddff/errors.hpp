#pragma once

#include <stdexcept>
#include <string>

namespace ddff {

/// Argument outside the mathematical domain of an operation (Z <= 0, r_m <= 0, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Sub-aperture or tensor index out of range.
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// Invalid configuration parameter (even window, unknown variant, S < 2, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// File-level failure while reading a dataset, checkpoint or image. The message names the file.
struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or parameter.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ddff
